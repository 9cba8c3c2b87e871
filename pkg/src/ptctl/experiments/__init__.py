from .scenarios import (
    SCENARIOS,
    ProbeResult,
    Scenario,
    SweepResult,
    energy_sweep,
    run_scenario,
    uniform_stability_probe,
)
from .svg import export_svg

__all__ = ["SCENARIOS", "ProbeResult", "Scenario", "SweepResult", "energy_sweep",
           "export_svg", "run_scenario", "uniform_stability_probe"]
