"""Training-cost arithmetic: GPUs x wall-clock hours x hourly rental rate."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal


@dataclass(frozen=True)
class TrainingSetup:
    label: str
    gpu_count: int
    wall_hours: float
    hourly_rate: float
    data_hours: float | None = None  # informational only

    def __post_init__(self):
        if self.gpu_count < 1:
            raise ValueError(f"gpu_count must be >= 1, got {self.gpu_count}")
        if self.wall_hours < 0:
            raise ValueError(f"wall_hours must be >= 0, got {self.wall_hours}")
        if self.hourly_rate < 0:
            raise ValueError(f"hourly_rate must be >= 0, got {self.hourly_rate}")


def estimate_cost(setup: TrainingSetup) -> float:
    """Total rental cost in currency units, rounded to cents (half-up)."""
    raw = Decimal(setup.gpu_count) * Decimal(str(setup.wall_hours)) * Decimal(str(setup.hourly_rate))
    return float(raw.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def cost_ratio(a: TrainingSetup, b: TrainingSetup) -> float:
    """estimate_cost(a) / estimate_cost(b); denominator must be positive."""
    denom = estimate_cost(b)
    if denom <= 0:
        raise ZeroDivisionError("cost_ratio denominator setup has zero cost")
    return estimate_cost(a) / denom


def format_currency(amount: float) -> str:
    """Dollar formatting: cents below $1,000, whole dollars at or above."""
    if amount >= 1000:
        return f"${round(amount):,}"
    return f"${amount:,.2f}"


def render_comparison(a: TrainingSetup, b: TrainingSetup) -> str:
    """Side-by-side table of two setups plus their cost ratio."""
    cost_a, cost_b = estimate_cost(a), estimate_cost(b)
    ratio = cost_ratio(a, b) if cost_b > 0 else float("inf")
    rows = [
        ("", a.label, b.label),
        ("Training Data (Hours)", _fmt_opt(a.data_hours), _fmt_opt(b.data_hours)),
        ("Hardware", f"{a.gpu_count} x GPU", f"{b.gpu_count} x GPU"),
        ("Training Time", f"{a.wall_hours:g} h", f"{b.wall_hours:g} h"),
        ("Est. Cost", format_currency(cost_a), format_currency(cost_b)),
    ]
    lines = [" | ".join(r) for r in rows]
    lines.append(f"cost ratio ({a.label} / {b.label}): {ratio:.1f}x")
    return "\n".join(lines) + "\n"


def _fmt_opt(value: float | None) -> str:
    return "-" if value is None else f"{value:,.2f}".rstrip("0").rstrip(".")
