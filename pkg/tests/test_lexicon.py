import pytest

from leap.lexicon import (
    LexiconParseError,
    SynonymLexicon,
    default_lexicon,
    default_stopwords,
    load_stopwords,
    load_wordnet,
    synonyms,
)
from leap.text import is_single_word


def test_fixture_synset(mini_wordnet):
    lex = load_wordnet(mini_wordnet)
    assert synonyms(lex, "good") == ["well"]
    assert synonyms(lex, "Good") == ["well"]
    assert synonyms(lex, "run") == ["go"]


def test_unknown_and_empty_lookups(mini_wordnet):
    lex = load_wordnet(mini_wordnet)
    assert synonyms(lex, "zzzz") == []
    assert synonyms(lex, "") == []


def test_multiword_lemmas_are_excluded(mini_wordnet):
    lex = load_wordnet(mini_wordnet)
    assert "ice_cream" not in lex.entries
    assert all("ice_cream" not in syns for syns in lex.entries.values())
    assert synonyms(lex, "cream") == []


def test_parse_is_idempotent(mini_wordnet):
    assert load_wordnet(mini_wordnet) == load_wordnet(mini_wordnet)


def test_missing_file_names_the_file(tmp_path, mini_wordnet):
    for name in ("data.noun", "data.verb", "data.adj"):
        (tmp_path / name).write_bytes((mini_wordnet / name).read_bytes())
    with pytest.raises(LexiconParseError, match="data.adv"):
        load_wordnet(tmp_path)


def test_bad_record_names_file_and_line(tmp_path, mini_wordnet):
    for name in ("data.noun", "data.verb", "data.adv"):
        (tmp_path / name).write_bytes((mini_wordnet / name).read_bytes())
    (tmp_path / "data.adj").write_text("  1 header  \n00000013 00 a zz good 0\n")
    with pytest.raises(LexiconParseError) as exc:
        load_wordnet(tmp_path)
    assert exc.value.line == 2 and exc.value.path.name == "data.adj"


def test_offset_mismatch_is_a_parse_error(tmp_path, mini_wordnet):
    for name in ("data.noun", "data.verb", "data.adv"):
        (tmp_path / name).write_bytes((mini_wordnet / name).read_bytes())
    (tmp_path / "data.adj").write_text("  1 header  \n00000000 00 a 02 good 0 well 0 000 | x\n")
    with pytest.raises(LexiconParseError, match="offset"):
        load_wordnet(tmp_path)


def test_crlf_copies_parse_identically(tmp_path, mini_wordnet):
    for p in mini_wordnet.iterdir():
        (tmp_path / p.name).write_bytes(p.read_bytes().replace(b"\n", b"\r\n"))
    assert load_wordnet(tmp_path) == load_wordnet(mini_wordnet)


def test_json_round_trip(tmp_path, mini_wordnet):
    lex = load_wordnet(mini_wordnet)
    lex.save(tmp_path / "lex.json")
    assert SynonymLexicon.load(tmp_path / "lex.json") == lex


def test_stopword_file_format(tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("the\na\n# c\n")
    assert load_stopwords(p).words == {"the", "a"}
    p.write_text("the\nthe\n")
    assert load_stopwords(p).words == {"the"}
    p.write_text("")
    with pytest.raises(ValueError, match="empty stopword list"):
        load_stopwords(p)


def test_bundled_resources_load():
    assert len(default_stopwords()) > 100
    lex = default_lexicon()
    assert lex.source_version == "3.0"
    assert "good" in lex.entries


def _check_invariants(lex):
    for head, syns in lex.entries.items():
        assert head not in syns
        assert list(syns) == sorted(set(syns))
        for s in syns:
            assert s == s.lower() and is_single_word(s)
            assert " " not in s and "_" not in s


def test_bundled_lexicon_invariants():
    _check_invariants(default_lexicon())


def test_real_wordnet_invariants_and_symmetry(real_wordnet):
    lex = load_wordnet(real_wordnet)
    assert lex.source_version.startswith("3")
    # both values from a separate line-splitting pass over the WordNet 3.0 data files
    assert len(lex) == 45081
    assert synonyms(lex, "Car") == ["auto", "automobile", "gondola", "machine", "motorcar", "railcar"]
    _check_invariants(lex)
    for head, syns in lex.entries.items():
        for s in syns:
            assert head in lex.entries[s], (head, s)
    assert load_wordnet(real_wordnet) == lex
