import pytest

from kahlercheck.presentation import parse_presentation

PRESENTATION_TEXTS = {
    "z2": "gens: x,y; rels: [x,y];",
    "z4": ("gens: a,b,c,d; rels: [a,b],[a,c],[a,d],[b,c],[b,d],[c,d];"),
    "free2": "gens: x,y; rels: ;",
    "heisenberg": "gens: x,y,c; rels: [x,y]c^-1, [x,c], [y,c];",
    "gamma2": "gens: a1,a2,a3,a4; rels: [a1,a3][a2,a4];",
    "cyclic3": "gens: a; rels: a^3;",
    "intro": ("gens: a1,a2,a3,a4,c; rels: [a1,a3][a2,a4]c^-1, "
              "[a1,c],[a2,c],[a3,c],[a4,c];"),
    "heisenberg_rank5": (
        "gens: x1,y1,x2,y2,c; rels: [x1,y1]c^-1, [x2,y2]c^-1, "
        "[x1,x2],[x1,y2],[y1,x2],[y1,y2], [x1,c],[y1,c],[x2,c],[y2,c];"),
}


@pytest.fixture(scope="session")
def pool():
    return {name: parse_presentation(text)
            for name, text in PRESENTATION_TEXTS.items()}
