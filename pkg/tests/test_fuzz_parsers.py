from __future__ import annotations

import pytest

from scripts.fuzz_parsers import TARGETS, random_loop, run_one, seed_corpus


@pytest.mark.parametrize("target", sorted(TARGETS))
def test_seed_corpus_parses(target):
    [sample] = seed_corpus(target)
    TARGETS[target](sample)


@pytest.mark.parametrize("target", sorted(TARGETS))
def test_mutations_only_raise_data_errors(target):
    assert random_loop(target, 300, seed=17) == 300


def test_empty_input_is_a_data_error():
    for target in TARGETS:
        run_one(target, b"")
