"""
End-to-end reports through the command line
============================================

The same pipeline as the other demos, driven by the ``watchrisk`` CLI:
generate scores, build the Level-I landscape, then assess two travelers.
"""

import json
import tempfile
from pathlib import Path

from watchrisk.cli import main

work = Path(tempfile.mkdtemp(prefix="watchrisk-"))
stamp = "2017-11-27T00:00:00Z"

main(["synth", "--out", str(work), "--seed", "2017"])
print("wrote", sorted(p.name for p in work.iterdir()))

main(["landscape", "--scores", str(work / "scores.csv"), "--out", str(work / "landscape.json"),
      "--cfn", "10", "--cfp", "1", "--pg", "0.1", "--timestamp", stamp])
level1 = json.loads((work / "landscape.json").read_text())["level1"]
print("risk coefficient:", level1["risk_coefficient_exact"])
print("menagerie counts:", level1["menagerie"]["counts"])
for row in level1["overall"]:
    print(f"  T={row['threshold']:5.1f}  FNR={row['fnr']:.4f}  FPR={row['fpr']:.4f}  risk={row['risk']:.4f}")

goat = level1["menagerie"]["members"]["goat"][0]
sheep = level1["menagerie"]["members"]["sheep"][0]
code = main(["assess", "--scores", str(work / "scores.csv"), "--travelers", f"{goat},{sheep}",
             "--out", str(work / "assess.json"), "--timestamp", stamp])
print("assess exit code:", code)
print((work / "assess.travelers.csv").read_text())
