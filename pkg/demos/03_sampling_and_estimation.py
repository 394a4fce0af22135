"""
From shots to a verdict
=======================

Sample both setting families for a noisy state, estimate the optimal
parameters with error bars, and decide.  Shots round-trip through the JSONL
format so that analysis can happen offline.
"""

# %%
import tempfile
from pathlib import Path

from ghz_witness import (
    Family,
    PreparedState,
    Protocol,
    estimate_expectations,
    evaluate,
    read_jsonl,
    sample_protocol,
    write_jsonl,
)

state = PreparedState.from_angles(5, theta=0.6, phi=0.9, p=0.1)

# %%
for protocol, families in ((Protocol.FULL, (Family.FULL_PHI, Family.FULL_PHI_THETA)),
                           (Protocol.EFFICIENT, (Family.EFFICIENT_PHI, Family.EFFICIENT_PHI_THETA))):
    records = sample_protocol(state, protocol, shots=50_000, seed=7)
    es = estimate_expectations(records)
    print(f"{protocol.value}: {len(records)} settings")
    for fam in families:
        r = evaluate(fam, es)
        line = f"  {fam.value:20s} W = {r.witness_value:+.4f} +- {r.witness_error:.4f}"
        line += f"  phi = {r.phi_opt:.4f} +- {r.phi_error:.4f}"
        if r.theta_opt is not None:
            line += f"  theta = {r.theta_opt:.4f} +- {r.theta_error:.4f}"
        print(line + f"  -> {r.verdict}")

# %%
# offline round trip
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "shots.jsonl"
    write_jsonl(records, path)
    print(path.read_text()[:120], "...")
    again = evaluate(Family.EFFICIENT_PHI_THETA, estimate_expectations(read_jsonl(path)))
    print("same report after reload:", again == evaluate(Family.EFFICIENT_PHI_THETA, es))
