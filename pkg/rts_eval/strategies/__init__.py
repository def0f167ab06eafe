from rts_eval.strategies.base import Strategy
from rts_eval.strategies.first import FirstStrategy, restrict_first
from rts_eval.strategies.gold import GoldStrategy, restrict_gold
from rts_eval.strategies.random_draws import RandomStrategy, restrict_random

STRATEGY_NAMES = ("first", "gold", "random")


def get_strategy(name: str, seed: int = 0, draws: int = 100) -> Strategy:
    """
    Registry for restriction strategies.
    """
    key = (name or "").strip().lower()
    if key == "first":
        return FirstStrategy()
    if key == "gold":
        return GoldStrategy()
    if key == "random":
        return RandomStrategy(seed=seed, draws=draws)
    raise ValueError(f"unknown strategy: {name} (known: {' | '.join(STRATEGY_NAMES)})")


__all__ = [
    "Strategy",
    "FirstStrategy",
    "GoldStrategy",
    "RandomStrategy",
    "STRATEGY_NAMES",
    "get_strategy",
    "restrict_first",
    "restrict_gold",
    "restrict_random",
]
