import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def mini_wordnet():
    return FIXTURES / "wordnet_mini"


@pytest.fixture(scope="session")
def real_wordnet():
    path = os.environ.get("LEAP_WORDNET_DIR")
    if not path or not (Path(path) / "data.noun").is_file():
        pytest.skip("set LEAP_WORDNET_DIR to a WordNet 3.x dict directory")
    return Path(path)


@pytest.fixture(scope="session")
def bundled():
    from leap.cli import bundled as path_of
    from leap.dataset import load_dataset
    from leap.lexicon import default_lexicon, default_stopwords
    from leap.victim import load_keyword_victim

    return {
        "dataset": load_dataset(path_of("minicorpus.csv")),
        "victim": load_keyword_victim(path_of("keyword_weights.json")),
        "lexicon": default_lexicon(),
        "stopwords": default_stopwords(),
        "weights_path": path_of("keyword_weights.json"),
        "corpus_path": path_of("minicorpus.csv"),
    }


@pytest.fixture(scope="session")
def small_campaign(bundled):
    from leap.campaign import run_campaign
    from leap.search import SearchConfig

    return run_campaign(
        bundled["dataset"], range(40), bundled["victim"], bundled["lexicon"], bundled["stopwords"], SearchConfig()
    )
