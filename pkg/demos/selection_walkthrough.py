"""Walk through one arbitration step of the immune network by hand.

Loads the bundled genome, builds the strength, idiotope and concentration
matrices, then shows which behaviour set each mode picks for every antigen
and how the choice drifts as concentrations build up.

    python3 demos/selection_walkthrough.py
"""

import numpy as np

from aisnav.perception import Antigen
from aisnav.resources import load_genome
from aisnav.stl_ais import (GREEDY, IDIOTYPIC, activations, build_matrices, select_antibody,
                            update_concentrations)

NAMES = ["unseen", "seen", "obst R", "obst B", "obst L", "coll R", "coll B", "coll L"]


def main():
    genome = load_genome()
    idio = build_matrices(genome, mode=IDIOTYPIC)
    greedy = build_matrices(genome, mode=GREEDY)
    np.set_printoptions(precision=3, suppress=True)
    print("strengths P (rows are gene sets, columns antigens):")
    print(idio.P)
    print("\nantigen    greedy  idiotypic  activations")
    for code, name in enumerate(NAMES, start=1):
        a = Antigen(code)
        print(f"{name:8s}  {select_antibody(greedy, a):6d}  {select_antibody(idio, a):9d}  "
              f"{activations(idio, a)}")

    # keep picking for 'target unseen' and watch concentrations lock in
    state = idio
    for step in range(200):
        state = update_concentrations(state, select_antibody(state, Antigen(1)))
    print("\nconcentrations after 200 'unseen' ticks:", state.C)
    print("selection per antigen now:",
          [select_antibody(state, Antigen(code)) for code in range(1, 9)])


if __name__ == "__main__":
    main()
