"""The batch check suite behind `minkeuclid report`.

A Config fixes every knob (sizes, seed, sample counts); the suite runs the
same named checks the command line tool prints, and the JSON serialization
is byte-identical for identical configs.

Run as:  python3 demos/05_check_suite.py

Command line equivalents:
    minkeuclid report --samples 2 --points 2 --pairs 6 --height 3 \
        --conjecture-n-max 2 --sweep-n-max 1 --sweep-m-max 1
    minkeuclid commutator --n 2 --m 1 --left D:j=1 --right Psi:p=1,q=1
    minkeuclid check-conjecture --n-max 2
"""

from minkeuclid import Config, Report, report_suite

cfg = Config(samples=2, points=2, pairs=6, height=3,
             conjecture_n_max=2, sweep_n_max=1, sweep_m_max=1)
report = report_suite(cfg)

print(report.to_text())
print()
print("counts:", report.counts())

blob = report.to_json()
again = report_suite(cfg).to_json()
print("byte-identical on rerun:", blob == again)

round_tripped = Report.from_json(blob)
print("round trips through JSON:", round_tripped.counts() == report.counts())
