import os

MANIFEST_NAME = "manifest.json"
RUN_CONFIG_NAME = "run-config.json"
HISTORY_NAME = "loss-history.csv"


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


def pair_dir(root, pair_id):
    return os.path.join(root, pair_id)


def manifest_path(root):
    return os.path.join(root, MANIFEST_NAME)


def checkpoint_path(out_dir, branch):
    return os.path.join(out_dir, f"checkpoint-{branch}.json")


def history_path(out_dir):
    return os.path.join(out_dir, HISTORY_NAME)


def run_config_path(out_dir):
    return os.path.join(out_dir, RUN_CONFIG_NAME)


def get_all_pair_ids(root):
    """Directories under root holding both cloud files."""
    if not os.path.isdir(root):
        return []
    return sorted(
        d
        for d in os.listdir(root)
        if os.path.isfile(os.path.join(root, d, "A.xyz"))
        and os.path.isfile(os.path.join(root, d, "B.xyz"))
    )
