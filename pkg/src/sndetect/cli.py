"""Command-line surface.

Exit codes: 0 success, 1 IO/format error, 2 unsupported language.
``SNDETECT_RESOURCES`` may point at a directory overriding the bundled
stopword lists and POS lexicons; ``SNDETECT_NUMBA=0`` forces the
pure-numpy kernels.
"""

import argparse
import json
import sys

from . import evaluation, keywords, postag, storage, textprep, topicmodel
from .embeddings import load_vectors
from .errors import CsvFormatError, SnDetectError, UnsupportedLanguage
from .pipeline import (
    CSV_HEADER,
    PipelineConfig,
    PipelineModels,
    batch_classify,
    sn_classification,
)
from .storage import load_bundle, make_bundle, save_bundle
from .textprep import RawDocument


def _print_report(report, fmt: str, include_neighbors: bool) -> None:
    if fmt == "json":
        print(json.dumps(report.to_json_dict(include_neighbors), ensure_ascii=False, indent=2, sort_keys=True))
    elif fmt == "csv":
        print(",".join(CSV_HEADER))
        for row in report.to_csv_rows():
            print(",".join(row))
    else:
        print(f"document: {report.doc_id}")
        print(f"language: {report.language}")
        print(f"text topic: {report.text_topic}")
        width = max([len("keyword")] + [len(r.keyword) for r in report.records])
        print(f"{'keyword':<{width}}  {'tag':<5}  {'sf topic':<16}  {'candidate':<9}  flags")
        for r in report.records:
            sf_topic = r.sf_topic or "(skipped)"
            flags = "|".join(sorted(r.flags)) or "-"
            mark = "yes" if r.candidate else "no"
            print(f"{r.keyword:<{width}}  {r.tag:<5}  {sf_topic:<16}  {mark:<9}  {flags}")
        names = ", ".join(c.keyword for c in report.candidates) or "(none)"
        print(f"candidates: {names}")


def cmd_train_topics(args) -> int:
    corpus = storage.read_corpus(args.corpus)
    labels = [label for label, _ in corpus.documents]
    streams = [
        textprep.prepare(doc.text, args.lang, doc_id=doc.id) for _, doc in corpus.documents
    ]
    hyperparams = topicmodel.LogRegHyperparams(c=args.c, tol=args.tol, max_iter=args.max_iter)
    classifier = topicmodel.train_topic_model(streams, labels, hyperparams)

    X = [topicmodel.transform(classifier.tfidf, s) for s in streams]

    def trainer(x_train, y_train):
        model = topicmodel.fit_logreg(
            x_train, y_train, hyperparams, n_features=classifier.tfidf.n_features
        )
        return lambda x: topicmodel.predict(model, x).label

    cv = evaluation.cross_validate(X, labels, args.cv_folds, trainer)
    for i, score in enumerate(cv.fold_scores):
        print(f"fold {i}: accuracy {score:.5f}")
    print(f"cv mean accuracy ({args.cv_folds} folds): {cv.mean:.5f}")

    predicted = [topicmodel.predict(classifier.logreg, x).label for x in X]
    cm = evaluation.confusion(labels, predicted, classifier.logreg.classes)
    print("training-set confusion matrix:")
    print(evaluation.render_confusion(cm))
    if not classifier.logreg.converged:
        print("warning: optimizer hit max_iter before the gradient tolerance", file=sys.stderr)

    bundle = make_bundle(classifier, args.lang)
    save_bundle(bundle, args.out)
    print(f"bundle written: {args.out}")
    return 0


def _load_models(args) -> PipelineModels:
    bundle = load_bundle(args.bundle)
    store = load_vectors(args.vectors, args.backend, getattr(args, "ngram_vectors", None))
    return PipelineModels.single(bundle, store)


def cmd_detect(args) -> int:
    if args.text == "-":
        text = sys.stdin.read()
        doc_id = "stdin"
    else:
        with open(args.text, encoding="utf-8") as fh:
            text = fh.read()
        doc_id = args.text
    config = PipelineConfig(
        lang=args.lang,
        topic=args.topic,
        kw=args.kw,
        topn=args.topn,
        backend=args.backend,
        target_class=args.target_class,
    )
    models = _load_models(args)
    doc = RawDocument(id=doc_id, text=text)
    report = sn_classification(doc, config, models)
    if args.dump_graph:
        stream = postag.tag(textprep.prepare(text, report.language))
        graph = keywords.build_graph(stream)
        storage.write_graph_edges(graph.edge_list(), args.dump_graph)
    _print_report(report, args.format, include_neighbors=not args.no_neighbors)
    return 0


def cmd_batch(args) -> int:
    config = PipelineConfig(
        lang=args.lang,
        topic=args.topic,
        kw=args.kw,
        topn=args.topn,
        backend=args.backend,
        min_concordance_chars=args.min_chars,
        target_class=args.target_class,
    )
    models = _load_models(args)
    reports, summary = batch_classify(args.csv, config, models)
    if args.format == "json":
        payload = {
            "reports": [r.to_json_dict(include_neighbors=not args.no_neighbors) for r in reports],
            "summary": {
                "model": summary.backend,
                "expected": summary.expected,
                "recovered": summary.recovered,
                "percentage": summary.percentage_text(),
                "skipped_short": summary.skipped_short,
                "skipped_unsupported": summary.skipped_unsupported,
                "term_candidates": summary.term_candidates,
            },
        }
        print(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True))
    else:
        print(",".join(["document_id"] + CSV_HEADER))
        for report in reports:
            for row in report.to_csv_rows():
                print(",".join([report.doc_id] + row))
        print()
        print(summary.render())
    return 0


def cmd_eval(args) -> int:
    import csv as _csv

    with open(args.predictions, newline="", encoding="utf-8") as fh:
        reader = _csv.reader(fh)
        try:
            header = [h.strip().lower() for h in next(reader)]
        except StopIteration:
            raise CsvFormatError("missing header row", row=0) from None
        if header not in (["true", "pred"], ["true", "pred", "tag"]):
            raise CsvFormatError(f"expected header 'true,pred[,tag]', got {header!r}", row=0)
        has_tag = len(header) == 3
        rows = []
        for n, row in enumerate(reader, start=1):
            if len(row) != len(header):
                raise CsvFormatError(f"expected {len(header)} fields, got {len(row)}", row=n)
            rows.append(row)
    if not rows:
        raise CsvFormatError("no data rows", row=1)
    y_true = [r[0] for r in rows]
    y_pred = [r[1] for r in rows]
    classes = tuple(sorted(set(y_true) | set(y_pred)))
    rep = evaluation.report(evaluation.confusion(y_true, y_pred, classes))
    per_tag = evaluation.per_pos_report([(r[2], r[0], r[1]) for r in rows]) if has_tag else {}
    if args.format == "json":
        payload = {"combined": evaluation.report_to_dict(rep)}
        for tag_name, tag_report in per_tag.items():
            if tag_name != "combined":
                payload[tag_name] = evaluation.report_to_dict(tag_report)
        print(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True))
        return 0
    print(evaluation.render_report(rep))
    for tag_name, tag_report in per_tag.items():
        if tag_name == "combined":
            continue
        print()
        print(f"[{tag_name}]")
        print(evaluation.render_report(tag_report))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sndetect",
        description="Semantic-neologism candidate detection pipeline (es/ca/fr).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train-topics", help="fit the TF-IDF + logistic-regression topic model")
    p_train.add_argument("corpus", help="label,text CSV or a <label>/<doc>.txt directory tree")
    p_train.add_argument("--out", required=True, help="output bundle path (JSON)")
    p_train.add_argument("--lang", default="es", choices=["es", "ca", "fr"])
    p_train.add_argument("--c", type=float, default=1.0, help="inverse regularization strength")
    p_train.add_argument("--tol", type=float, default=1e-4, help="gradient max-norm stopping tolerance")
    p_train.add_argument("--max-iter", type=int, default=1000)
    p_train.add_argument("--cv-folds", type=int, default=5)
    p_train.set_defaults(func=cmd_train_topics)

    def add_model_flags(p):
        p.add_argument("--bundle", required=True, help="topic model bundle (JSON)")
        p.add_argument("--vectors", required=True, help="word2vec text-format vector file")
        p.add_argument("--ngram-vectors", default=None, help="n-gram vector file (subword backend)")
        p.add_argument("--backend", default="sense", choices=["plain", "sense", "subword"])
        p.add_argument("--lang", default="auto")
        p.add_argument("--topic", default="auto")
        p.add_argument("--kw", type=int, default=10)
        p.add_argument("--topn", type=int, default=140)
        p.add_argument("--target-class", default="informática")
        p.add_argument("--format", default="text", choices=["json", "csv", "text"])
        p.add_argument("--no-neighbors", action="store_true", help="omit neighbor lists from JSON")

    p_detect = sub.add_parser("detect", help="run the pipeline on one text")
    p_detect.add_argument("text", help="text file path, or - for stdin")
    add_model_flags(p_detect)
    p_detect.add_argument("--dump-graph", default=None, help="write the co-occurrence edge list here")
    p_detect.set_defaults(func=cmd_detect)

    p_batch = sub.add_parser("batch", help="run the pipeline over a term,concordance CSV")
    p_batch.add_argument("csv", help="CSV with header term,concordance")
    add_model_flags(p_batch)
    p_batch.add_argument("--min-chars", type=int, default=130, help="minimum concordance length")
    p_batch.set_defaults(func=cmd_batch)

    p_eval = sub.add_parser("eval", help="classification report from a true,pred[,tag] CSV")
    p_eval.add_argument("predictions")
    p_eval.add_argument("--format", default="text", choices=["text", "json"])
    p_eval.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnsupportedLanguage as exc:
        print(f"language not supported: {exc}", file=sys.stderr)
        return 2
    except SnDetectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
