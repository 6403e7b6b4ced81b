#!/usr/bin/env python3
"""Regenerate the committed synthetic fixture under fixtures/synthetic_200.

The fixture is fully determined by the seed below; re-running this script
must reproduce the committed files byte for byte.
"""

import argparse
from pathlib import Path

from leadshare.records import write_contributions, write_corpus
from leadshare.synth import demo_corpus

FIXTURE_SEED = 20240811

CONFIG_TEXT = """\
# synthetic 200-paper fixture
corpus = corpus.jsonl
contributions = contributions.jsonl
output_dir = out
lead_threshold = 0.65
if_bin_edges = 1,2,4,8,16
window_start = 2010
window_end = 2021
confidence_level = 0.95
seed = 0
counting_mode = author_paper
model_family = linear
focal_region = China
threshold_sweep = 0.5,0.55,0.6,0.65,0.7,0.75,0.8
"""


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--dest",
        type=Path,
        default=Path(__file__).resolve().parent.parent / "fixtures" / "synthetic_200",
    )
    args = parser.parse_args()
    args.dest.mkdir(parents=True, exist_ok=True)

    records, contributions = demo_corpus(seed=FIXTURE_SEED, n_papers=200)
    with open(args.dest / "corpus.jsonl", "w", encoding="utf-8") as fh:
        n_papers = write_corpus(records, fh)
    with open(args.dest / "contributions.jsonl", "w", encoding="utf-8") as fh:
        n_statements = write_contributions(contributions, fh)
    (args.dest / "config.cfg").write_text(CONFIG_TEXT, encoding="utf-8")
    print(f"wrote {n_papers} papers, {n_statements} statements to {args.dest}")


if __name__ == "__main__":
    main()
