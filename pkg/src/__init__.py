"""
ATOMS Lab
Adaptive tournament model selection under distribution drift, with baselines,
synthetic drift environments and a walk-forward backtest harness.
"""
