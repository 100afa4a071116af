"""Closest balanced TU-game under weighted least squares, with the
supporting pieces: minimal balanced collections, balancedness tests,
core-face classification, and the simulation harnesses built on them."""

from .game import (
    Game,
    MobiusVector,
    coalition_label,
    coalition_of,
    coalition_value,
    dirac,
    game_from_dict,
    game_to_dict,
    grand_coalition,
    inverse_mobius,
    load_game,
    make_game,
    members,
    mobius,
    parse_coalition,
    random_game,
    save_game,
    unanimity,
)

__version__ = "0.1.0"
