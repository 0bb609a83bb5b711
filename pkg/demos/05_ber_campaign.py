"""
A small coded beamforming BER sweep
===================================

Runs a campaign over node counts for a short code and writes the CSV the
command line produces with ``adaptive-ldpc simulate``.
"""

import tempfile
from pathlib import Path

from adaptive_ldpc.harness import Campaign, Link, run_campaign, summarize
from adaptive_ldpc.optimizer import CgaParams, construct
from adaptive_ldpc.protograph import CodeSpec

code = construct(CodeSpec(240, "1/2", seed=3), CgaParams(max_evaluations=3000))
out = Path(tempfile.mkdtemp()) / "sweep.csv"

campaign = Campaign(
    m_list=[2, 4, 6],
    ebn0_list=[-3.0, -1.0],
    min_bit_errors=100,
    min_frame_errors=20,
    max_frames=1500,
    seed=3,
    out=str(out),
)
records = run_campaign(campaign, Link(code))
print(summarize(records))

# Running again finds every point already done and simulates nothing
again = run_campaign(campaign, Link(code))
print("resumed rows identical:", [r.bit_errors for r in again] == [r.bit_errors for r in records])
print(out.read_text().splitlines()[0])
