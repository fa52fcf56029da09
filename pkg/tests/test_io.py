import json

import numpy as np
import pytest

from myoretarget.anatomy import Bone, BodyModel, MusculotendonUnit, Skeleton, Waypoint
from myoretarget.service import (FORMAT, ModelFormatError, canonical_json,
                                 load_model, model_from_dict, model_hash,
                                 model_to_dict, save_model)

from conftest import rod_inertia


def test_round_trip_is_byte_stable(toy, tmp_path):
    path = tmp_path / "model.msk.json"
    h1 = save_model(toy, path)
    loaded = load_model(path)
    path2 = tmp_path / "model2.msk.json"
    h2 = save_model(loaded, path2)
    assert h1 == h2
    assert path.read_bytes() == path2.read_bytes()
    assert model_hash(toy) == h1


def test_hash_changes_with_content(toy):
    other = toy.with_muscles(
        [toy.muscles[0].with_lengths(toy.muscles[0].l_m0 * 1.01,
                                     toy.muscles[0].l_t0)]
        + list(toy.muscles[1:]))
    assert model_hash(other) != model_hash(toy)


def paper_scale_doc():
    """Synthetic skeleton with the reference model's joint composition:
    one free root, 13 ball-and-socket, 5 revolute (50 dofs), 282 trivial
    muscles."""
    bones = [{"id": "root", "parent": None, "joint_type": "free_root",
              "local_offset": [0, 0, 0], "shaft_axis": [0, 0, 1],
              "mass": 5.0, "inertia": np.diag([0.1, 0.1, 0.1]).tolist(),
              "length": 0.1}]
    parent = "root"
    for i in range(13):
        bones.append({"id": f"ball{i}", "parent": parent,
                      "joint_type": "ball_and_socket",
                      "local_offset": [0.1, 0, 0], "shaft_axis": [1, 0, 0],
                      "mass": 1.0, "inertia": rod_inertia().tolist(),
                      "length": 0.1})
        parent = f"ball{i}"
    for i in range(5):
        bones.append({"id": f"rev{i}", "parent": parent,
                      "joint_type": "revolute", "joint_axis": [0, 0, 1],
                      "local_offset": [0.1, 0, 0], "shaft_axis": [1, 0, 0],
                      "mass": 1.0, "inertia": rod_inertia().tolist(),
                      "length": 0.1})
        parent = f"rev{i}"
    muscles = []
    for i in range(282):
        a = f"ball{i % 13}"
        b = f"rev{i % 5}"
        muscles.append({
            "id": f"mtu{i:03d}", "l_m0": 0.08, "l_t0": 0.1, "f_max": 400.0,
            "waypoints": [
                {"skinning": [{"bone": a, "weight": 1.0, "coords": [0.02, 0, 0]}]},
                {"skinning": [{"bone": b, "weight": 1.0, "coords": [0.05, 0, 0]}]},
            ]})
    return {"format": FORMAT, "bones": bones, "muscles": muscles, "curves": {}}


def test_paper_scale_model_loads():
    model = model_from_dict(paper_scale_doc())
    assert len(model.muscles) == 282
    assert model.skeleton.dof_count == 50
    for m in model.muscles:
        assert m.k_m == 1.6
        assert m.k_t == 1.03


def test_skeleton_only_model_is_valid():
    doc = paper_scale_doc()
    doc["muscles"] = []
    model = model_from_dict(doc)
    assert len(model.muscles) == 0


def test_bad_weight_sum_names_waypoint():
    doc = paper_scale_doc()
    doc["muscles"][3]["waypoints"][1]["skinning"][0]["weight"] = 0.7
    with pytest.raises(ModelFormatError,
                       match=r"muscles\[3\] \(mtu003\).waypoints\[1\]"):
        model_from_dict(doc)


def test_unknown_parent_reported():
    doc = paper_scale_doc()
    doc["bones"][5]["parent"] = "missing"
    with pytest.raises(ModelFormatError, match="missing"):
        model_from_dict(doc)


def test_missing_field_located():
    doc = paper_scale_doc()
    del doc["muscles"][0]["l_m0"]
    with pytest.raises(ModelFormatError, match=r"muscles\[0\].*l_m0"):
        model_from_dict(doc)


def test_wrong_format_tag_rejected():
    doc = paper_scale_doc()
    doc["format"] = "msk-0"
    with pytest.raises(ModelFormatError, match="format"):
        model_from_dict(doc)


def test_invalid_json_reported(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ModelFormatError, match="invalid JSON"):
        load_model(path)


def test_canonical_json_sorted_and_compact(toy):
    text = canonical_json(model_to_dict(toy))
    doc = json.loads(text)
    assert list(doc.keys()) == sorted(doc.keys())
    assert "\n" not in text[:-1]


def test_two_free_roots_rejected():
    doc = paper_scale_doc()
    doc["bones"][1]["joint_type"] = "free_root"
    doc["bones"][1]["parent"] = None
    with pytest.raises(ModelFormatError, match="free_root"):
        model_from_dict(doc)
