"""Multi-objective CCHP dispatch: model, BCS-GDE solver, NSGA-II baseline,
quality indicators and a comparison harness."""

__version__ = "0.1.0"
