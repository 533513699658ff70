# %% [markdown]
# # Recomputing the published evaluation tables from their counts
#
# The four ratios are negative predictive value (P0), precision (P1),
# sensitivity (Sn) and specificity (Sp); the last row is their mean in percent.

# %%
from bvalnet import ConfusionMatrix, metrics, render_report

published = {
    "Region 1, training": (2, 101, 7, 12),
    "Region 2, test": (2, 107, 4, 9),
    "Region 4, test": (0, 90, 12, 20),
    "Region 4, test after oversampling": (5, 87, 15, 15),
}
for title, counts in published.items():
    cm = ConfusionMatrix(*counts)
    print(render_report(metrics(cm), cm, title=title))
