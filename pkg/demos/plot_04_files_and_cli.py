"""
Working with files and the command line
========================================

CSV input with missing values and a text column, the posterior file
format, and the same pipeline through ``rankcop`` subcommands.
"""

import json
import tempfile
from pathlib import Path

from rankcop import load_csv, read_posterior
from rankcop.cli import main

work = Path(tempfile.mkdtemp())

# %%
# Text columns need an explicit level order, given as a JSON sidecar.
(work / "survey.csv").write_text(
    "DEG,CHILD,AGE\n"
    "HS,2,34\nBach,1,41\nNone,NA,58\nGrad,0,29\nHS,3,NA\n"
    "Bach,2,45\nHS,1,37\nGrad,1,52\nNone,4,63\nBach,0,31\n"
)
(work / "levels.json").write_text(json.dumps({"DEG": ["None", "HS", "Bach", "Grad"]}))
data = load_csv(work / "survey.csv", level_orders=work / "levels.json")
print(data.names, data.column("DEG").codes)

# %%
# Fit, summarize and predict. Every command is deterministic given its
# seed; the metadata file carries a hash of the data it was fitted to.
args = ["--input", work / "survey.csv", "--levels", work / "levels.json"]
main([str(a) for a in ["fit", *args, "--output", work / "post.csv", "--nscan", 3000, "--seed", 1]])
main([str(a) for a in ["summarize", "--posterior", work / "post.csv", "--output", work / "summary.json"]])
main([str(a) for a in ["predict", "--posterior", work / "post.csv", *args, "--output", work / "table.json",
                       "--target", "CHILD", "--given", "DEG=Grad"]])

post = read_posterior(work / "post.csv")
print(len(post), "saved draws;", post.metadata["config"])
print(json.loads((work / "table.json").read_text()))

# %%
# With ten rows the posterior is wide; the summary shows it.
summary = json.loads((work / "summary.json").read_text())
for r in summary["correlations"]:
    print(r["a"], r["b"], [round(q, 2) for q in r["quantiles"]])
