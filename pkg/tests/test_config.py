from src import config


def test_directories_exist():
    config.require_ready()
    assert config.LOG_DIR.is_dir()
    assert config.ORBIT_THREADS >= 1


def test_path_for_pruned_is_safe():
    path = config.path_for_pruned("1/2,1,-1,-1", "20261017")
    assert path.parent == config.EXPORT_DIR
    assert path.name == "pruned_1_2_1_-1_-1_20261017.csv"
