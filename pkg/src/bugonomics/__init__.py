"""Cost accounting and reporting checks for vulnerability-discovery campaigns."""

from __future__ import annotations

__version__ = "0.1.0"

from .core import Interval, Money, money_from_usd  # noqa: E402
from .cost import UnitCostResult, cost_per_accepted, cost_per_impact_backed, cost_per_validated_finding  # noqa: E402
from .kernels import BACKEND  # noqa: E402
from .lint import CampaignReport, validate_campaign_report  # noqa: E402
from .metrics import campaign_summary, funnel_metrics  # noqa: E402
from .sensitivity import analyze, lift_cost_model, monte_carlo  # noqa: E402
from .serialize import load_campaign, load_fixture  # noqa: E402
from .sim import PipelineConfig, simulate  # noqa: E402

__all__ = [
    "BACKEND",
    "CampaignReport",
    "Interval",
    "Money",
    "PipelineConfig",
    "UnitCostResult",
    "analyze",
    "campaign_summary",
    "cost_per_accepted",
    "cost_per_impact_backed",
    "cost_per_validated_finding",
    "funnel_metrics",
    "lift_cost_model",
    "load_campaign",
    "load_fixture",
    "money_from_usd",
    "monte_carlo",
    "simulate",
    "validate_campaign_report",
]
