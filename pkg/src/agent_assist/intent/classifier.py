"""Intent identification: encoder + linear head with softmax output.

Covers fine-grained N-way classification, the binary in-domain gate, and
few-shot adaptation where the encoder stays frozen and only a fresh head
is trained on the new classes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
from torch import nn

from agent_assist.backends.base import TextEncoder
from agent_assist.backends.ops import encode_texts
from agent_assist.evaluation.metrics import macro_f1
from agent_assist.training_utils import linear_warmup_schedule, shuffled_batches


def normalize_query(text: str) -> str:
    return " ".join(text.split())


@dataclass(frozen=True)
class IntentLabelSet:
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) < 2:
            raise ValueError("a label set needs at least two labels")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be unique")

    def __len__(self) -> int:
        return len(self.labels)

    def index_of(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class LabeledQuery:
    text: str
    label_index: int

    def __post_init__(self) -> None:
        if not normalize_query(self.text):
            raise ValueError("query text is empty after whitespace normalization")
        if self.label_index < 0:
            raise ValueError("label_index must be >= 0")


@dataclass
class IntentPrediction:
    probabilities: np.ndarray
    top_label: str
    confidence: float


@dataclass
class TrainReport:
    epoch_losses: list[float] = field(default_factory=list)
    val_losses: list[float] = field(default_factory=list)
    val_macro_f1: float | None = None
    best_epoch: int = 1
    stopping_reason: str = "max_epochs"


@dataclass(frozen=True)
class IntentTrainConfig:
    epochs: int = 40
    batch_size: int = 16
    lr: float = 2e-5
    warmup_ratio: float = 0.20
    val_fraction: float = 0.05
    patience: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if not 0 <= self.val_fraction < 1:
            raise ValueError("val_fraction must be in [0, 1)")


@dataclass(frozen=True)
class FewShotConfig:
    epochs: int = 5
    batch_size: int = 6
    lr: float = 1e-3
    seed: int = 0


class IntentClassifier:
    """softmax(W * embed(query) + b) over a fixed label set."""

    def __init__(
        self,
        encoder: TextEncoder,
        weights: np.ndarray,
        bias: np.ndarray,
        label_set: IntentLabelSet,
    ):
        weights = np.asarray(weights, dtype=np.float32)
        bias = np.asarray(bias, dtype=np.float32)
        if weights.shape != (len(label_set), encoder.spec.embedding_dim):
            raise ValueError(
                f"head weights must be [{len(label_set)} x {encoder.spec.embedding_dim}], "
                f"got {weights.shape}"
            )
        if bias.shape != (len(label_set),):
            raise ValueError("bias must have one entry per label")
        self.encoder = encoder
        self.weights = weights
        self.bias = bias
        self.label_set = label_set

    def save(self, directory) -> None:
        """Persist as a directory: label set, head weights, encoder name.

        A fine-tuned encoder is embedded as a sub-artifact so predictions
        survive the round trip; otherwise the encoder is rebuilt from its
        checkpoint name at load time.
        """
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "labels.json").write_text(json.dumps(list(self.label_set.labels)))
        np.savez(directory / "head.npz", weights=self.weights, bias=self.bias)
        manifest = {
            "encoder_checkpoint": self.encoder.spec.checkpoint_name,
            "schema_version": 1,
        }
        from agent_assist.backends.stub import save_stub_artifact

        try:
            save_stub_artifact(self.encoder, directory / "encoder")
            manifest["encoder_artifact"] = "encoder"
        except TypeError:
            pass
        (directory / "manifest.json").write_text(json.dumps(manifest))

    @classmethod
    def load(cls, directory, encoder: TextEncoder | None = None) -> "IntentClassifier":
        directory = Path(directory)
        labels = IntentLabelSet(tuple(json.loads((directory / "labels.json").read_text())))
        head = np.load(directory / "head.npz")
        if encoder is None:
            manifest = json.loads((directory / "manifest.json").read_text())
            if manifest.get("encoder_artifact"):
                from agent_assist.backends.stub import load_stub_artifact

                encoder = load_stub_artifact(directory / manifest["encoder_artifact"])
            else:
                from agent_assist.backends.registry import load_encoder

                encoder = load_encoder(manifest["encoder_checkpoint"])
        return cls(encoder, head["weights"], head["bias"], labels)

    def predict(self, query: str) -> "IntentPrediction":
        return classify_intent(query, self)


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


def classify_intent(query: str, classifier: IntentClassifier) -> IntentPrediction:
    normalized = normalize_query(query)
    if not normalized:
        raise ValueError("query is empty after normalization")
    embedding = encode_texts([normalized], classifier.encoder, mode="query")[0]
    logits = classifier.weights @ embedding + classifier.bias
    probabilities = softmax(logits.astype(np.float64))
    top = int(np.argmax(probabilities))
    return IntentPrediction(
        probabilities=probabilities,
        top_label=classifier.label_set.labels[top],
        confidence=float(probabilities[top]),
    )


def _validate_train_set(train_set: Sequence[LabeledQuery], n_labels: int) -> None:
    if not train_set:
        raise ValueError("train_set must be nonempty")
    for example in train_set:
        if example.label_index >= n_labels:
            raise ValueError(
                f"label index {example.label_index} out of range for {n_labels} labels"
            )


def _embed_frozen(texts: list[str], encoder: TextEncoder) -> torch.Tensor:
    return torch.from_numpy(encode_texts(texts, encoder, mode="query").astype(np.float32))


def train_intent_classifier(
    train_set: Sequence[LabeledQuery],
    label_set: IntentLabelSet,
    encoder: TextEncoder,
    config: IntentTrainConfig | None = None,
) -> tuple[IntentClassifier, TrainReport]:
    """Fine-tune encoder + head with early stopping on validation loss.

    A seeded fraction of the training set is held out for validation; the
    model from the best-validation-loss epoch is returned. Encoders that
    expose torch modules are tuned end to end (on a private clone); other
    encoders stay frozen and only the head is trained.
    """
    config = config or IntentTrainConfig()
    _validate_train_set(train_set, len(label_set))

    rng = np.random.default_rng(config.seed)
    torch.manual_seed(config.seed)
    order = rng.permutation(len(train_set))
    n_val = int(round(len(train_set) * config.val_fraction))
    if n_val == 0 or len(train_set) - n_val == 0:
        n_val = 0
    val_set = [train_set[i] for i in order[:n_val]]
    fit_set = [train_set[i] for i in order[n_val:]]

    trainable = hasattr(encoder, "embed_torch") and hasattr(encoder, "clone")
    tuned = encoder.clone() if trainable else encoder
    dim = tuned.spec.embedding_dim
    head = nn.Linear(dim, len(label_set))

    params = list(head.parameters())
    if trainable:
        tuned.torch_module().train()
        params += list(tuned.torch_module().parameters())
    optimizer = torch.optim.AdamW(params, lr=config.lr)
    steps_per_epoch = int(np.ceil(len(fit_set) / config.batch_size))
    lr_schedule = linear_warmup_schedule(
        optimizer, config.epochs * steps_per_epoch, config.warmup_ratio
    )

    fit_texts = [normalize_query(e.text) for e in fit_set]
    fit_labels = torch.tensor([e.label_index for e in fit_set], dtype=torch.long)
    val_texts = [normalize_query(e.text) for e in val_set]
    val_labels = torch.tensor([e.label_index for e in val_set], dtype=torch.long)
    if not trainable:
        fit_embs = _embed_frozen(fit_texts, tuned)

    def embed(texts: list[str], indices=None) -> torch.Tensor:
        if trainable:
            return tuned.embed_torch(texts, mode="query")
        return fit_embs[indices]

    report = TrainReport()
    best_val = float("inf")
    best_state = None
    patience_left = config.patience
    for epoch in range(1, config.epochs + 1):
        losses = []
        for batch in shuffled_batches(len(fit_set), config.batch_size, rng):
            embeddings = embed([fit_texts[i] for i in batch], torch.from_numpy(batch))
            loss = nn.functional.cross_entropy(head(embeddings), fit_labels[batch])
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            lr_schedule.step()
            losses.append(float(loss.detach()))
        report.epoch_losses.append(float(np.mean(losses)))

        if not val_set:
            continue
        with torch.no_grad():
            val_logits = head(_embed_frozen(val_texts, tuned) if not trainable
                              else tuned.embed_torch(val_texts, mode="query"))
            val_loss = float(nn.functional.cross_entropy(val_logits, val_labels))
        report.val_losses.append(val_loss)
        if val_loss < best_val - 1e-12:
            best_val = val_loss
            report.best_epoch = epoch
            best_state = {
                "head": {k: v.clone() for k, v in head.state_dict().items()},
                "encoder": {k: v.clone() for k, v in tuned.torch_module().state_dict().items()}
                if trainable else None,
            }
            patience_left = config.patience
        else:
            patience_left -= 1
            if patience_left <= 0:
                report.stopping_reason = "early_stopping"
                break

    if best_state is not None:
        head.load_state_dict(best_state["head"])
        if trainable and best_state["encoder"] is not None:
            tuned.torch_module().load_state_dict(best_state["encoder"])
    if not val_set:
        report.best_epoch = len(report.epoch_losses)
    if trainable:
        tuned.torch_module().eval()

    classifier = IntentClassifier(
        tuned,
        head.weight.detach().numpy(),
        head.bias.detach().numpy(),
        label_set,
    )
    if val_set:
        predictions = [
            classify_intent(text, classifier) for text in val_texts
        ]
        predicted = [classifier.label_set.index_of(p.top_label) for p in predictions]
        report.val_macro_f1 = macro_f1(
            [e.label_index for e in val_set], predicted, len(label_set)
        )
    return classifier, report


def few_shot_adapt(
    frozen_classifier: IntentClassifier,
    support_set: Sequence[LabeledQuery],
    new_label_set: IntentLabelSet,
    config: FewShotConfig | None = None,
) -> IntentClassifier:
    """Train a fresh head for new classes on top of the frozen encoder.

    The encoder is used purely as a feature extractor and is never
    modified; every new class needs at least one support example.
    """
    config = config or FewShotConfig()
    _validate_train_set(support_set, len(new_label_set))
    counts = np.zeros(len(new_label_set), dtype=int)
    for example in support_set:
        counts[example.label_index] += 1
    missing = [new_label_set.labels[i] for i in np.flatnonzero(counts == 0)]
    if missing:
        raise ValueError(f"no support examples for classes: {missing}")

    encoder = frozen_classifier.encoder
    embeddings = _embed_frozen([normalize_query(e.text) for e in support_set], encoder)
    labels = torch.tensor([e.label_index for e in support_set], dtype=torch.long)

    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)
    head = nn.Linear(encoder.spec.embedding_dim, len(new_label_set))
    optimizer = torch.optim.AdamW(head.parameters(), lr=config.lr)
    for _ in range(config.epochs):
        for batch in shuffled_batches(len(support_set), config.batch_size, rng):
            loss = nn.functional.cross_entropy(
                head(embeddings[batch]), labels[batch]
            )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()

    return IntentClassifier(
        encoder,
        head.weight.detach().numpy(),
        head.bias.detach().numpy(),
        new_label_set,
    )


@dataclass
class GateModel:
    """Binary in-domain / out-of-domain gate."""

    classifier: IntentClassifier
    positive_label: str

    def __post_init__(self) -> None:
        if len(self.classifier.label_set) != 2:
            raise ValueError("gate classifier must have exactly two classes")
        if self.positive_label not in self.classifier.label_set.labels:
            raise ValueError("positive_label must be one of the gate's labels")

    def decide(self, query: str, threshold: float = 0.5) -> tuple[bool, float]:
        return gate_query(query, self, threshold)


def train_domain_gate(
    positive_set: Sequence[str],
    negative_set: Sequence[str],
    encoder: TextEncoder,
    config: IntentTrainConfig | None = None,
    *,
    positive_label: str = "agent-related",
    negative_label: str = "general",
) -> tuple[GateModel, TrainReport]:
    if not positive_set or not negative_set:
        raise ValueError("both positive and negative sets must be nonempty")
    label_set = IntentLabelSet((negative_label, positive_label))
    examples = [LabeledQuery(t, 1) for t in positive_set]
    examples += [LabeledQuery(t, 0) for t in negative_set]
    classifier, report = train_intent_classifier(examples, label_set, encoder, config)
    return GateModel(classifier, positive_label), report


def save_gate(gate: GateModel, directory) -> None:
    gate.classifier.save(directory)
    (Path(directory) / "gate.json").write_text(
        json.dumps({"positive_label": gate.positive_label})
    )


def load_gate(directory, encoder: TextEncoder | None = None) -> GateModel:
    classifier = IntentClassifier.load(directory, encoder)
    meta = json.loads((Path(directory) / "gate.json").read_text())
    return GateModel(classifier, meta["positive_label"])


def gate_query(query: str, gate: GateModel, threshold: float = 0.5) -> tuple[bool, float]:
    """(in_domain, confidence): in-domain iff P(positive) strictly exceeds
    the threshold."""
    prediction = classify_intent(query, gate.classifier)
    positive_index = gate.classifier.label_set.index_of(gate.positive_label)
    confidence = float(prediction.probabilities[positive_index])
    return confidence > threshold, confidence


def evaluate_intent_classifier(
    classifier: IntentClassifier, examples: Sequence[LabeledQuery]
) -> dict[str, float]:
    if not examples:
        raise ValueError("examples must be nonempty")
    true_labels = [e.label_index for e in examples]
    predicted = [
        classifier.label_set.index_of(classify_intent(e.text, classifier).top_label)
        for e in examples
    ]
    correct = sum(1 for t, p in zip(true_labels, predicted) if t == p)
    return {
        "macro_f1": macro_f1(true_labels, predicted, len(classifier.label_set)),
        "accuracy": correct / len(examples),
    }


def load_labeled_queries(path, label_set: IntentLabelSet | None = None
                         ) -> tuple[list[LabeledQuery], IntentLabelSet]:
    """Read {"text","label"} JSON-lines; infers the label set when not given."""
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                row = json.loads(line)
                rows.append((row["text"], str(row["label"])))
    if label_set is None:
        label_set = IntentLabelSet(tuple(sorted({label for _, label in rows})))
    examples = [LabeledQuery(text, label_set.index_of(label)) for text, label in rows]
    return examples, label_set
