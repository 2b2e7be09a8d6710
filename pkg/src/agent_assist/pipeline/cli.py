"""Command-line entry points.

Exit codes: 0 success, 1 runtime failure, 2 usage error. Diagnostics go to
stderr; structured results (reports, pipeline output) go to stdout as JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from agent_assist.backends.base import DecodingConfig


def _add_decoding_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--max-new-tokens", type=int, default=200)
    parser.add_argument("--temperature", type=float, default=0.7)
    parser.add_argument("--top-k", type=int, default=100)
    parser.add_argument("--top-p", type=float, default=0.0)
    parser.add_argument("--seed", type=int, default=0)


def _decoding_from_args(args: argparse.Namespace) -> DecodingConfig:
    return DecodingConfig(
        max_new_tokens=args.max_new_tokens,
        temperature=args.temperature,
        top_k=args.top_k,
        top_p=args.top_p,
        seed=args.seed,
    )


def _save_backend(backend, out_dir: str) -> None:
    from agent_assist.backends.stub import save_stub_artifact

    try:
        save_stub_artifact(backend, out_dir)
        return
    except TypeError:
        pass
    model = getattr(backend, "model", None)
    if model is not None and hasattr(model, "save_pretrained"):
        model.save_pretrained(out_dir)
        tokenizer = getattr(backend, "tokenizer", None)
        if tokenizer is not None:
            tokenizer.save_pretrained(out_dir)
        return
    raise RuntimeError(f"do not know how to persist {type(backend).__name__}")


def cmd_ingest(args: argparse.Namespace) -> int:
    from agent_assist.backends.registry import load_encoder
    from agent_assist.retrieval.chunking import ChunkingConfig, Document, chunk_corpus, load_kb
    from agent_assist.retrieval.index import build_index

    kb = load_kb(args.kb)
    if kb and isinstance(kb[0], Document):
        cfg = ChunkingConfig(args.sentences, args.overlap, args.clean)
        units = chunk_corpus(kb, cfg)
    else:
        units = kb
    encoder = load_encoder(args.encoder)
    index = build_index(units, encoder, similarity=args.similarity)
    index.save(args.out)
    print(json.dumps({"indexed": len(index), "dim": index.dim, "out": str(args.out)}))
    return 0


def cmd_train_gate(args: argparse.Namespace) -> int:
    from agent_assist.backends.registry import load_encoder
    from agent_assist.intent.classifier import (
        IntentTrainConfig,
        load_labeled_queries,
        save_gate,
        train_domain_gate,
    )

    examples, label_set = load_labeled_queries(args.data)
    if args.positive_label not in label_set.labels:
        raise ValueError(f"positive label {args.positive_label!r} not present in data")
    positive = [e.text for e in examples
                if label_set.labels[e.label_index] == args.positive_label]
    negative = [e.text for e in examples
                if label_set.labels[e.label_index] != args.positive_label]
    config = IntentTrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                               lr=args.lr, val_fraction=args.val_fraction, seed=args.seed)
    gate, report = train_domain_gate(
        positive, negative, load_encoder(args.encoder), config,
        positive_label=args.positive_label,
    )
    save_gate(gate, args.out)
    print(json.dumps({"out": str(args.out), "best_epoch": report.best_epoch,
                      "val_macro_f1": report.val_macro_f1,
                      "stopping_reason": report.stopping_reason}))
    return 0


def cmd_train_intent(args: argparse.Namespace) -> int:
    from agent_assist.backends.registry import load_encoder
    from agent_assist.intent.classifier import (
        IntentTrainConfig,
        load_labeled_queries,
        train_intent_classifier,
    )

    examples, label_set = load_labeled_queries(args.data)
    config = IntentTrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                               lr=args.lr, val_fraction=args.val_fraction, seed=args.seed)
    classifier, report = train_intent_classifier(
        examples, label_set, load_encoder(args.encoder), config
    )
    classifier.save(args.out)
    print(json.dumps({"out": str(args.out), "labels": len(label_set),
                      "best_epoch": report.best_epoch,
                      "val_macro_f1": report.val_macro_f1,
                      "stopping_reason": report.stopping_reason}))
    return 0


def _load_pairs(path: str) -> list[tuple[str, str]]:
    pairs = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                row = json.loads(line)
                question = row.get("question") or row.get("query")
                passage = row.get("passage") or row.get("positive")
                if not question or not passage:
                    raise ValueError("pair records need 'question' and 'passage' fields")
                pairs.append((question, passage))
    return pairs


def cmd_train_bi_encoder(args: argparse.Namespace) -> int:
    from agent_assist.backends.registry import load_encoder
    from agent_assist.retrieval.mnrl import MNRLConfig
    from agent_assist.retrieval.training import FineTuneSchedule, train_bi_encoder

    pairs = _load_pairs(args.pairs)
    schedule = FineTuneSchedule(epochs=args.epochs, batch_size=args.batch_size,
                                lr=args.lr, seed=args.seed)
    result = train_bi_encoder(pairs, load_encoder(args.encoder),
                              MNRLConfig(similarity=args.similarity), schedule)
    _save_backend(result.model, args.out)
    print(json.dumps({"out": str(args.out), "epoch_losses": result.epoch_losses}))
    return 0


def cmd_train_cross_encoder(args: argparse.Namespace) -> int:
    from agent_assist.backends.registry import load_pair_scorer
    from agent_assist.retrieval.training import FineTuneSchedule, train_cross_encoder

    pairs = _load_pairs(args.pairs)
    schedule = FineTuneSchedule(epochs=args.epochs, batch_size=args.batch_size,
                                lr=args.lr, seed=args.seed)
    result = train_cross_encoder(pairs, load_pair_scorer(args.cross_encoder), schedule)
    _save_backend(result.model, args.out)
    print(json.dumps({"out": str(args.out), "epoch_losses": result.epoch_losses}))
    return 0


def cmd_train_generator(args: argparse.Namespace) -> int:
    from agent_assist.backends.registry import load_generator
    from agent_assist.generation.preprocess import load_qa_records
    from agent_assist.generation.training import GenTrainConfig, train_generator

    records = load_qa_records(args.records)
    cfg = GenTrainConfig(epochs=args.epochs, lr=args.lr, seed=args.seed,
                         num_distractors=args.num_distractors)
    result = train_generator(records, load_generator(args.generator), cfg)
    _save_backend(result.generator, args.out)
    print(json.dumps({"out": str(args.out), "epoch_losses": result.epoch_losses}))
    return 0


def cmd_eval_retrieval(args: argparse.Namespace) -> int:
    from agent_assist.backends.registry import load_encoder, load_pair_scorer
    from agent_assist.evaluation.harness import evaluate_retrieval, load_retrieval_fixtures
    from agent_assist.retrieval.index import DenseRetriever, EmbeddingIndex

    index = EmbeddingIndex.load(args.index)
    encoder = load_encoder(args.encoder or index.encoder_checkpoint)
    retriever = DenseRetriever(encoder, index)
    reranker = load_pair_scorer(args.reranker) if args.reranker else None
    fixtures = load_retrieval_fixtures(args.fixtures)
    report = evaluate_retrieval(retriever, reranker, fixtures, pool_size=args.pool_size)
    _emit_report(report, args.report)
    return 0


def cmd_eval_generation(args: argparse.Namespace) -> int:
    from agent_assist.backends.registry import load_generator
    from agent_assist.evaluation.harness import evaluate_generation
    from agent_assist.generation.preprocess import load_qa_records

    records = load_qa_records(args.records)
    report = evaluate_generation(load_generator(args.generator), records,
                                 _decoding_from_args(args))
    _emit_report(report, args.report)
    return 0


def cmd_eval_intent(args: argparse.Namespace) -> int:
    from agent_assist.evaluation.harness import EvalReport
    from agent_assist.intent.classifier import (
        IntentClassifier,
        evaluate_intent_classifier,
        load_labeled_queries,
    )

    classifier = IntentClassifier.load(args.model)
    examples, _ = load_labeled_queries(args.data, classifier.label_set)
    metrics = evaluate_intent_classifier(classifier, examples)
    report = EvalReport(metrics, sample_count=len(examples),
                        protocol={"task": "intent", "model": str(args.model)})
    _emit_report(report, args.report)
    return 0


def _emit_report(report, out_path: str | None) -> None:
    payload = report.to_json()
    if out_path:
        Path(out_path).write_text(payload)
    print(payload)


def cmd_query(args: argparse.Namespace) -> int:
    from agent_assist.pipeline.core import (
        answer_query,
        load_components,
        load_pipeline_config,
    )
    from agent_assist.pipeline.stores import FeedbackStore, OODIntentStore

    config = load_pipeline_config(args.config)
    components = load_components(config)
    ood_store = OODIntentStore(config.ood_store_path or None)
    feedback_store = FeedbackStore(config.feedback_store_path or None,
                                   config.results_store_path or None)
    result = answer_query(args.text, components, config,
                          ood_store=ood_store, feedback_store=feedback_store)
    print(json.dumps(result.to_dict(), indent=2))
    return 1 if result.error is not None else 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from agent_assist.pipeline.core import load_components, load_pipeline_config
    from agent_assist.pipeline.stores import FeedbackStore, OODIntentStore
    from agent_assist.service.app import ServiceState, create_app

    config = load_pipeline_config(args.config)
    state = ServiceState(
        components=load_components(config),
        config=config,
        feedback_store=FeedbackStore(config.feedback_store_path or None,
                                     config.results_store_path or None),
        ood_store=OODIntentStore(config.ood_store_path or None),
    )
    uvicorn.run(create_app(state), host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agent-assist",
        description="Customer-support assist pipeline: ingest, train, eval, query, serve.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    ingest = sub.add_parser("ingest", help="build an embedding index from a KB file")
    ingest.add_argument("--kb", required=True, help="JSON-lines KB (documents or QA pairs)")
    ingest.add_argument("--out", required=True, help="index output directory")
    ingest.add_argument("--encoder", default="stub:encoder")
    ingest.add_argument("--sentences", type=int, default=3,
                        help="sentences per passage (2/3/4 = short/medium/long)")
    ingest.add_argument("--overlap", type=int, default=0)
    ingest.add_argument("--clean", action="store_true", help="normalize the corpus first")
    ingest.add_argument("--similarity", choices=("dot", "cosine"), default="dot")
    ingest.set_defaults(handler=cmd_ingest)

    train = sub.add_parser("train", help="train or fine-tune a component")
    train_sub = train.add_subparsers(dest="target", metavar="TARGET")

    gate = train_sub.add_parser("gate", help="binary in-domain gate")
    gate.add_argument("--data", required=True, help='JSON-lines {"text","label"}')
    gate.add_argument("--positive-label", required=True)
    gate.add_argument("--encoder", default="stub:encoder")
    gate.add_argument("--out", required=True)
    gate.add_argument("--epochs", type=int, default=40)
    gate.add_argument("--batch-size", type=int, default=16)
    gate.add_argument("--lr", type=float, default=2e-5)
    gate.add_argument("--val-fraction", type=float, default=0.05)
    gate.add_argument("--seed", type=int, default=0)
    gate.set_defaults(handler=cmd_train_gate)

    intent = train_sub.add_parser("intent", help="N-way intent classifier")
    intent.add_argument("--data", required=True, help='JSON-lines {"text","label"}')
    intent.add_argument("--encoder", default="stub:encoder")
    intent.add_argument("--out", required=True)
    intent.add_argument("--epochs", type=int, default=40)
    intent.add_argument("--batch-size", type=int, default=16)
    intent.add_argument("--lr", type=float, default=2e-5)
    intent.add_argument("--val-fraction", type=float, default=0.05)
    intent.add_argument("--seed", type=int, default=0)
    intent.set_defaults(handler=cmd_train_intent)

    bi = train_sub.add_parser("bi-encoder", help="fine-tune the retriever encoder")
    bi.add_argument("--pairs", required=True, help='JSON-lines {"question","passage"}')
    bi.add_argument("--encoder", default="stub:encoder")
    bi.add_argument("--out", required=True)
    bi.add_argument("--epochs", type=int, default=3)
    bi.add_argument("--batch-size", type=int, default=16)
    bi.add_argument("--lr", type=float, default=2e-5)
    bi.add_argument("--seed", type=int, default=0)
    bi.add_argument("--similarity", choices=("dot", "cosine"), default="dot")
    bi.set_defaults(handler=cmd_train_bi_encoder)

    cross = train_sub.add_parser("cross-encoder", help="fine-tune the re-ranker")
    cross.add_argument("--pairs", required=True, help='JSON-lines {"question","passage"}')
    cross.add_argument("--cross-encoder", default="stub:reranker")
    cross.add_argument("--out", required=True)
    cross.add_argument("--epochs", type=int, default=3)
    cross.add_argument("--batch-size", type=int, default=16)
    cross.add_argument("--lr", type=float, default=2e-5)
    cross.add_argument("--seed", type=int, default=0)
    cross.set_defaults(handler=cmd_train_cross_encoder)

    gen = train_sub.add_parser("generator", help="multi-task generator fine-tuning")
    gen.add_argument("--records", required=True, help="JSON-lines QA records")
    gen.add_argument("--generator", default="stub:generator")
    gen.add_argument("--out", required=True)
    gen.add_argument("--epochs", type=int, default=5)
    gen.add_argument("--lr", type=float, default=5e-5)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--num-distractors", type=int, default=1)
    gen.set_defaults(handler=cmd_train_generator)

    evaluate = sub.add_parser("eval", help="run an evaluation harness")
    eval_sub = evaluate.add_subparsers(dest="target", metavar="TARGET")

    eval_ret = eval_sub.add_parser("retrieval", help="MRR/MAP over fixtures")
    eval_ret.add_argument("--index", required=True)
    eval_ret.add_argument("--encoder", default="")
    eval_ret.add_argument("--reranker", default="")
    eval_ret.add_argument("--fixtures", required=True,
                          help='JSON-lines {"query_id","query","relevant_ids"}')
    eval_ret.add_argument("--pool-size", type=int, default=10)
    eval_ret.add_argument("--report", default="")
    eval_ret.set_defaults(handler=cmd_eval_retrieval)

    eval_gen = eval_sub.add_parser("generation", help="token F1 / BLEU-1 / ROUGE")
    eval_gen.add_argument("--records", required=True)
    eval_gen.add_argument("--generator", default="stub:generator")
    eval_gen.add_argument("--report", default="")
    _add_decoding_args(eval_gen)
    eval_gen.set_defaults(handler=cmd_eval_generation)

    eval_int = eval_sub.add_parser("intent", help="macro-F1 of a saved classifier")
    eval_int.add_argument("--model", required=True)
    eval_int.add_argument("--data", required=True)
    eval_int.add_argument("--report", default="")
    eval_int.set_defaults(handler=cmd_eval_intent)

    query = sub.add_parser("query", help="answer one query and print the result JSON")
    query.add_argument("--text", required=True)
    query.add_argument("--config", default=None, help="config file (default: $NAA_CONFIG)")
    query.set_defaults(handler=cmd_query)

    serve = sub.add_parser("serve", help="start the REST service")
    serve.add_argument("--config", default=None)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8080)
    serve.set_defaults(handler=cmd_serve)

    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    if not hasattr(args, "handler"):
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.handler(args) or 0
    except Exception as exc:  # runtime failure -> code 1 with a diagnostic line
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
