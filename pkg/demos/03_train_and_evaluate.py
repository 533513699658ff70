# %% [markdown]
# # Training the 7-15-1 network and scoring it
#
# Fit min-max input scaling on the training set, train for 500 epochs of
# online backpropagation, then threshold the outputs at Mc / 8 and tabulate.

# %%
from datetime import date

from bvalnet import (
    ConfusionMatrix, Normalizer, RegionConfig, SynthParams, ThresholdPolicy, TrainParams,
    build_dataset, gen_catalog, init_network, metrics, predict, render_report, train,
)
from bvalnet.seismicity import DateWindow

cat = gen_catalog(SynthParams(b_true=1.0, cutoff=3.0, rate=0.3, duration=1400, seed=7))
region = RegionConfig(
    name="demo", region_id=0, cutoff_magnitude=3.0,
    train_window=DateWindow.from_dates(date(2000, 9, 1), date(2001, 12, 31)),
    test_window=DateWindow.from_dates(date(2002, 1, 1), date(2003, 6, 30)),
)
train_set = build_dataset(cat, region, "training")
test_set = build_dataset(cat, region, "test")

# %%
norm = Normalizer.fit(train_set.inputs())
net, history = train(
    init_network(seed=0),
    norm.transform(train_set.inputs()),
    norm.scale_targets(train_set.targets()),
    TrainParams(epochs=500, learning_rate=0.1),
)
print(f"mean loss: epoch 1 {history[0]:.4f}, epoch 500 {history[-1]:.4f}")

# %%
policy = ThresholdPolicy.for_cutoff(region.cutoff_magnitude)
for label, data in (("self test", train_set), ("test", test_set)):
    cm = ConfusionMatrix.from_outputs(predict(net, data.inputs(), norm), data.targets(), policy)
    print(render_report(metrics(cm), cm, title=label))
