"""Train the GCN on synthetic contracts and repeat for 1-6 hidden layers.

Labels are exact: a contract is vulnerable iff a reachable block executes
TIMESTAMP. Takes about a minute.

Run: python demos/04_train_and_sweep.py
"""

from evmcfg.dataset import preprocess, split
from evmcfg.gcn import GcnConfig, GcnModel, TrainConfig, predict, train
from evmcfg.metrics import confusion, metrics
from evmcfg.synthetic import synthetic_corpus

records = synthetic_corpus(400, seed=42)
pre = preprocess(records)
graphs = dict(zip(pre.ids, pre.graphs))
parts = split(records, seed=42)
train_set = [graphs[i] for i in parts.train]
test_set = [graphs[i] for i in parts.test]
print(f"{len(train_set)} train / {len(test_set)} test graphs, "
      f"{max(g.n for g in graphs.values())} blocks at most")

# %% Default model: 2 hidden layers of width 64, Adam at 1e-3 for 100 epochs.
model, history = train(GcnModel.initialize(GcnConfig()), train_set, TrainConfig())
print("loss:", " ".join(f"{history[e]:.3f}" for e in (0, 9, 49, 99)))
report = metrics(confusion([predict(model, g)[0] for g in test_set],
                           [g.label for g in test_set]))
print(report.to_dict())

# %% Layer ablation, scores x100.
print(f"{'layers':>6} {'acc':>7} {'recall':>7} {'prec':>7} {'f1':>7}")
for layers in range(1, 7):
    m, _ = train(GcnModel.initialize(GcnConfig(layers)), train_set, TrainConfig(epochs=30))
    r = metrics(confusion([predict(m, g)[0] for g in test_set], [g.label for g in test_set]))
    print(f"{layers:>6} " + " ".join(f"{100 * v:7.2f}" for v in
                                      (r.accuracy, r.recall, r.precision, r.f1)))
