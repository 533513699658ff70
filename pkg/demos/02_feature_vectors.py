# %% [markdown]
# # Building the seven-input feature vectors
#
# Every event that has at least 69 predecessors becomes an anchor. Its vector
# holds five b-value differences, the prior-week maximum magnitude and the
# chance of an M >= 6 event implied by its b-value; the target is the largest
# magnitude in the following five days.

# %%
from datetime import date

from bvalnet import RegionConfig, SynthParams, augment_dataset, build_dataset, gen_catalog
from bvalnet.seismicity import DateWindow, first_anchor_index
from bvalnet.synthcat import OmoriParams

cat = gen_catalog(
    SynthParams(b_true=1.0, cutoff=3.0, rate=0.3, duration=1400, seed=7,
                aftershocks=OmoriParams(productivity=2.0, trigger_magnitude=4.0))
)
region = RegionConfig(
    name="demo", region_id=0, cutoff_magnitude=3.0,
    train_window=DateWindow.from_dates(date(2000, 9, 1), date(2001, 12, 31)),
    test_window=DateWindow.from_dates(date(2002, 1, 1), date(2003, 6, 30)),
)
print(len(cat), "events; earliest possible anchor is event #", first_anchor_index() + 1)

# %%
train = build_dataset(cat, region, "training", count=122)
for v in train.vectors[:3]:
    print(v.anchor_time.date(), [round(x, 4) for x in v.inputs], "->", round(v.y, 2))

# %%
positives = sum(v.y > 0 for v in train)
print(f"{positives} of {len(train)} training anchors are followed by an event within 5 days")

# %%
# oversampling: duplicate the 20 vectors with the largest targets
augmented = augment_dataset(train, 20)
print(len(train), "->", len(augmented), "vectors")
