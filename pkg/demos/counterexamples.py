"""Walk the corpus and print where each model sits in the chain
faithful, prefibration, fibration, pretopological, topological."""
from topofam.cli import summary
from topofam.corpus.registry import corpus_entries, subject_context
from topofam.topological import classify

for entry in corpus_entries():
    model = entry.build()
    for name in model.expectations:
        c = classify(subject_context(model, name))
        assert c.flags == model.expectations[name]
        print(f"{entry.name:24} {summary(c.flags, c.routes)}")
        for k, v in sorted(c.witnesses.items()):
            print(f"{'':26}{k}: {v}")
        print(f"{'':26}({entry.note})")
