"""Reference figures for the GUM and RST-DT treebanks, used by the corpus-gated checks and reports.

Genre names follow the GUM file names (``whow`` for how-to guides, ``voyage``
for travel guides).
"""

from __future__ import annotations

# docs, tokens, EDUs, relation instances, fine labels, coarse classes
CORPUS_TOTALS = {
    "gum": {"docs": 193, "train": 145, "dev": 24, "test": 24, "tokens": 180_851, "edus": 23_107,
            "relations": 21_903, "fine_labels": 32, "classes": 15},
    "rstdt": {"docs": 385, "train": 347, "test": 38, "tokens": 203_352, "edus": 21_789,
              "relations": 20_163, "fine_labels": 78, "classes": 17},
}

# genre -> (docs, tokens, EDUs)
GUM_GENRES = {
    "academic": (18, 17_168, 1_969),
    "bio": (20, 18_209, 2_066),
    "fiction": (19, 17_508, 2_458),
    "whow": (19, 17_085, 2_367),
    "interview": (19, 18_189, 2_404),
    "news": (23, 16_140, 1_760),
    "reddit": (18, 16_364, 2_231),
    "voyage": (18, 16_513, 1_785),
    "conversation": (9, 10_451, 1_878),
    "speech": (10, 10_827, 1_249),
    "textbook": (10, 11_190, 1_397),
    "vlog": (10, 11_200, 1_543),
}
GUM_GENRE_TOTAL = (193, 180_844, 23_107)

# training selection -> (docs, EDUs)
OVA_TRAIN_SIZES = {
    "academic": (131, 16_088),
    "bio": (129, 15_901),
    "fiction": (130, 15_640),
    "interview": (130, 15_599),
    "news": (126, 16_252),
    "reddit": (131, 15_892),
    "voyage": (131, 16_133),
    "whow": (130, 15_672),
}
ALL_LARGE_TRAIN_SIZE = (122, 13_703)
GUM_TRAIN_SIZE = (145, 17_610)

# cohort -> [(genre, docs, EDUs)], (total docs, total EDUs)
FIXED_COHORTS = {
    "C1": ([("academic", 18, 1_970), ("bio", 19, 1_981), ("news", 23, 1_760)], (60, 5_711)),
    "C2": ([("fiction", 15, 1_941), ("interview", 15, 1_931), ("whow", 15, 1_840)], (45, 5_712)),
    "C3": ([("academic", 9, 1_004), ("bio", 9, 930), ("news", 10, 635), ("fiction", 8, 1_027),
            ("interview", 8, 1_199), ("whow", 8, 917)], (52, 5_712)),
}


def cohort_spec(name: str) -> list[tuple[str, int]]:
    """(genre, document count) rows of a reference cohort."""
    return [(g, n) for g, n, _ in FIXED_COHORTS[name][0]]


NS_SHARE = {"rstdt": 77.7, "gum": 70.1, "gum-news": 74.8}
MAPPING_MISMATCH_RATE = 13.3

# held-out degradation (baseline minus held-out, S/N/R)
OVA_DEGRADATION = {
    "academic": (1.7, 2.3, 4.1),
    "bio": (1.6, 4.3, 8.0),
    "fiction": (1.8, 3.0, 1.7),
    "interview": (0.3, 2.2, 1.2),
    "news": (-0.5, -0.8, -2.2),
    "reddit": (0.6, 0.4, 0.8),
    "voyage": (0.9, 2.4, 2.4),
    "whow": (9.3, 9.3, 9.9),
    "conversation": (2.7, 3.1, 4.9),
    "speech": (-0.4, 1.5, 0.4),
    "textbook": (1.2, 2.6, 2.9),
    "vlog": (1.5, 0.0, 2.5),
}

CLASS_ACCURACY = {
    "Attribution": 0.875, "Purpose": 0.861, "same-unit": 0.814, "Contingency": 0.794,
    "Elaboration": 0.666, "Joint": 0.654, "Topic": 0.574, "Mode": 0.504,
    "Context": 0.471, "Adversative": 0.467, "Organization": 0.463, "Explanation": 0.431,
    "Causal": 0.384, "Evaluation": 0.362, "Restatement": 0.308, "root": 0.208,
}

MAX_RESIDUALS = {
    "textbook": ("Context", 3.64), "speech": ("Explanation", 3.14), "reddit": ("Explanation", 3.02),
    "fiction": ("Evaluation", 2.59), "bio": ("Causal", 2.26), "vlog": ("Causal", 2.23),
    "conversation": ("Organization", 2.14), "voyage": ("Context", 2.13), "academic": ("Organization", 1.84),
    "whow": ("Organization", 1.62), "news": ("Explanation", 1.38), "interview": ("Evaluation", 0.89),
}

# (train, test) -> root EDU accuracy
CDU_ACCURACY = {("rstdt", "gum"): 0.042, ("gum", "gum"): 0.375, ("rstdt-ft", "rstdt"): 0.842,
                ("gum", "rstdt"): 0.553}

NUCLEARITY_F1 = {"NS": 82.6, "SN": 73.4}
SEGMENTATION_F1 = {("rstdt", "gum"): 89.89}
COHORT_C3_SCORES = {"micro_S": 59.8, "macro_S": 63.5}
