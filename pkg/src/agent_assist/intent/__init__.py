from agent_assist.intent.augment import (
    AugmentationConfig,
    AugmentationResult,
    augment_back_translation,
    augment_insertion,
)
from agent_assist.intent.classifier import (
    FewShotConfig,
    GateModel,
    IntentClassifier,
    IntentLabelSet,
    IntentPrediction,
    IntentTrainConfig,
    LabeledQuery,
    TrainReport,
    classify_intent,
    evaluate_intent_classifier,
    few_shot_adapt,
    gate_query,
    load_labeled_queries,
    normalize_query,
    train_domain_gate,
    train_intent_classifier,
)
from agent_assist.intent.keywords import candidate_ngrams, extract_ood_keywords
from agent_assist.intent.stopwords import STOPWORDS

__all__ = [
    "AugmentationConfig",
    "AugmentationResult",
    "augment_back_translation",
    "augment_insertion",
    "FewShotConfig",
    "GateModel",
    "IntentClassifier",
    "IntentLabelSet",
    "IntentPrediction",
    "IntentTrainConfig",
    "LabeledQuery",
    "TrainReport",
    "classify_intent",
    "evaluate_intent_classifier",
    "few_shot_adapt",
    "gate_query",
    "load_labeled_queries",
    "normalize_query",
    "train_domain_gate",
    "train_intent_classifier",
    "candidate_ngrams",
    "extract_ood_keywords",
    "STOPWORDS",
]
