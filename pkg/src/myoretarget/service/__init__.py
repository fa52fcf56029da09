from .config import ConfigError, load_config, parse_config, skeleton_params_from_config
from .datasets import (DatasetFormatError, ingest_dataset, pose_to_record,
                       record_to_pose, save_dataset_csv, save_dataset_jsonl)
from .io import (FORMAT, ModelFormatError, canonical_json, load_model,
                 model_from_dict, model_hash, model_to_dict, save_model)
from .store import JobRecord, JobStateError, ProjectStore, StaleBaseError

__all__ = [
    "ConfigError", "DatasetFormatError", "FORMAT", "JobRecord",
    "JobStateError", "ModelFormatError", "ProjectStore", "StaleBaseError",
    "canonical_json", "ingest_dataset", "load_config", "load_model",
    "model_from_dict", "model_hash", "model_to_dict", "parse_config",
    "pose_to_record", "record_to_pose", "save_dataset_csv",
    "save_dataset_jsonl", "save_model", "skeleton_params_from_config",
]
