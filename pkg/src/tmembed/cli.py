"""Command-line entry point: build-vocab, train, export, eval, neighbors,
explain, clauses.

Every training run writes a JSON manifest next to the model with the full
configuration, seed, corpus digest and per-round error series, enough to
reproduce the run bit-exactly. Environment variables are never consulted;
behavior is controlled by explicit flags only.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time

from . import core, corpus, embedding, evaluation, interpret

logger = logging.getLogger("tmembed")

MANIFEST_VERSION = 1


def _file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _load_corpus(args) -> tuple[corpus.Vocabulary, corpus.DocumentSet]:
    """Raw text or compiled cache, sniffed by magic bytes. A prebuilt
    vocabulary file (--vocab) overrides vocabulary selection flags."""
    if corpus.is_corpus_cache(args.corpus):
        if args.vocab is not None:
            raise ValueError("--vocab cannot be combined with a compiled corpus cache")
        return corpus.load_corpus_cache(args.corpus)
    stop = corpus.load_stopwords(args.stopwords) if args.stopwords else None
    token_sets = corpus.load_token_sets(args.corpus, stopwords=stop)
    if args.vocab is not None:
        vocab = corpus.Vocabulary.load(args.vocab)
    else:
        vocab = corpus.build_vocab(token_sets, min_df=args.min_df,
                                   max_vocab=args.max_vocab)
    return vocab, corpus.DocumentSet.from_token_sets(token_sets, vocab)


def _add_vocab_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--min-df", type=int, default=1,
                        help="minimum document frequency (default 1)")
    parser.add_argument("--max-vocab", type=int, default=None,
                        help="keep only the most frequent tokens")
    parser.add_argument("--stopwords", default=None, metavar="PATH",
                        help="file with one stopword per line")


def cmd_build_vocab(args) -> int:
    stop = corpus.load_stopwords(args.stopwords) if args.stopwords else None
    token_sets = corpus.load_token_sets(args.corpus, stopwords=stop)
    vocab = corpus.build_vocab(token_sets, min_df=args.min_df,
                               max_vocab=args.max_vocab)
    vocab.save(args.out)
    if args.compile:
        dset = corpus.DocumentSet.from_token_sets(token_sets, vocab)
        corpus.save_corpus_cache(vocab, dset, args.compile)
    logger.info("vocabulary: %d tokens -> %s", len(vocab), args.out)
    print(f"wrote {len(vocab)} tokens to {args.out}")
    return 0


def cmd_train(args) -> int:
    seed = args.seed if args.seed is not None else 0
    config = embedding.EmbedConfig(
        tm=core.TMConfig(n_clauses=args.clauses, margin=args.margin,
                         specificity=args.specificity,
                         memory_depth=args.memory_depth, seed=seed),
        accumulation=args.accumulation, rounds=args.rounds)
    vocab, dset = _load_corpus(args)
    logger.info("training: %d words, %d documents, %d clauses, %d rounds",
                len(vocab), dset.num_docs, args.clauses, args.rounds)

    errors: list[float] = []
    skipped: list[int] = []

    def record(rnd: int, err: float, skip: int) -> None:
        errors.append(err)
        skipped.append(skip)
        if rnd % max(1, args.rounds // 10) == 0:
            logger.info("round %d/%d: mean margin error %.1f", rnd, args.rounds, err)

    started = time.monotonic()
    tm = embedding.train(dset, vocab, config, on_round=record)
    elapsed = time.monotonic() - started

    core.save_model(tm, vocab.words, args.out)
    from . import __version__
    manifest = {
        "manifest_version": MANIFEST_VERSION,
        "tmembed_version": __version__,
        "command": "train",
        "corpus": str(args.corpus),
        "corpus_sha256": _file_digest(args.corpus),
        "vocabulary_sha256": core.vocabulary_digest(vocab.words),
        "config": {
            "clauses": args.clauses,
            "margin": args.margin,
            "specificity": args.specificity,
            "memory_depth": args.memory_depth,
            "accumulation": args.accumulation,
            "rounds": args.rounds,
            "seed": seed,
            "min_df": args.min_df,
            "max_vocab": args.max_vocab,
            "stopwords": args.stopwords,
            "vocab_file": args.vocab,
        },
        "threads": args.threads,
        "wall_clock_seconds": elapsed,
        "skipped_examples": skipped,
        "mean_margin_error": errors,
    }
    with open(str(args.out) + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"trained {len(vocab)} words in {elapsed:.1f}s -> {args.out}")
    return 0


def cmd_export(args) -> int:
    tm, words = core.load_model(args.model)
    emb = embedding.extract_embeddings(tm)
    if args.format == "binary":
        embedding.save_embeddings_binary(emb, words, args.out, matrix=args.matrix)
    elif args.matrix == "weighted":
        embedding.save_weighted_text(emb, words, args.out)
    else:
        embedding.save_binary_text(emb, words, args.out)
    print(f"exported {args.matrix} embeddings ({args.format}) -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    tm, words = core.load_model(args.model)
    vocab = corpus.Vocabulary(words)
    emb = embedding.extract_embeddings(tm)
    dataset = evaluation.SimilarityDataset.load(args.dataset)
    report = evaluation.evaluate_similarity(emb, vocab, dataset)
    if args.report == "json":
        print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    else:
        fields = report.as_dict()
        print("\t".join(fields))
        print("\t".join(f"{v:.6f}" if isinstance(v, float) else str(v)
                        for v in fields.values()))
    return 0


def cmd_neighbors(args) -> int:
    tm, words = core.load_model(args.model)
    vocab = corpus.Vocabulary(words)
    emb = embedding.extract_embeddings(tm)
    for word, score in evaluation.nearest_neighbors(emb, vocab, args.word, args.top):
        print(f"{word}\t{score:.6f}")
    return 0


def cmd_explain(args) -> int:
    tm, words = core.load_model(args.model)
    vocab = corpus.Vocabulary(words)
    explanations = interpret.explain_word(tm, args.word, args.top, vocab)
    if args.format == "json":
        print(interpret.explanations_to_json(explanations))
    else:
        k = vocab.index[args.word]
        for e in explanations:
            weight = int(tm.weights[k, e.clause_id])
            print(f"clause {e.clause_id} (weight {weight}): "
                  f"{interpret.format_conjunction(e.literals)}")
    return 0


def cmd_clauses(args) -> int:
    tm, words = core.load_model(args.model)
    vocab = corpus.Vocabulary(words)
    for j in range(tm.n_clauses):
        e = interpret.decode_clause(tm, j, vocab)
        connected = [(w, wt) for w, wt in e.connected_words if wt >= args.min_weight]
        if not connected:
            continue
        supports = " ".join(f"{w}:{wt}" for w, wt in connected)
        print(f"clause {j}: {interpret.format_conjunction(e.literals)} | {supports}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tmembed",
        description="Sparse logical word embeddings via a Tsetlin machine autoencoder")
    parser.add_argument("--verbose", action="store_true",
                        help="log progress to stderr")
    parser.add_argument("--seed", type=int, default=None, dest="global_seed",
                        help="global seed (train's own --seed wins)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker hint; results are identical for any value")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-vocab", help="select the vocabulary from a corpus")
    p.add_argument("--corpus", required=True, help="one document per line, UTF-8")
    p.add_argument("--out", required=True, help="vocabulary file (one token per line)")
    _add_vocab_flags(p)
    p.add_argument("--compile", default=None, metavar="PATH",
                   help="also write a compiled corpus cache")
    p.set_defaults(func=cmd_build_vocab)

    p = sub.add_parser("train", help="train the autoencoder on a corpus")
    p.add_argument("--corpus", required=True,
                   help="raw text (one document per line) or a compiled cache")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--vocab", default=None, help="prebuilt vocabulary file")
    _add_vocab_flags(p)
    p.add_argument("--clauses", type=int, default=600)
    p.add_argument("--margin", type=int, default=1200)
    p.add_argument("--specificity", type=float, default=5.0)
    p.add_argument("--memory-depth", type=int, default=2)
    p.add_argument("--accumulation", type=int, default=25)
    p.add_argument("--rounds", type=int, default=2000)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("export", help="export embeddings")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--matrix", choices=["weighted", "binary"], default="weighted")
    p.add_argument("--format", choices=["text", "binary"], default="text")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("eval", help="score embeddings against word-pair similarities")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True,
                   help="rows of 'word_a word_b score'; '#' lines ignored")
    p.add_argument("--report", choices=["tsv", "json"], default="tsv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("neighbors", help="nearest neighbors of a word")
    p.add_argument("--model", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=cmd_neighbors)

    p = sub.add_parser("explain", help="strongest clauses for a word")
    p.add_argument("--model", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("clauses", help="list decoded clauses and their words")
    p.add_argument("--model", required=True)
    p.add_argument("--min-weight", type=int, default=1,
                   help="hide connections below this weight")
    p.set_defaults(func=cmd_clauses)

    return parser


def dispatch(argv) -> int:
    """Route to a subcommand; exit 0 on success, 1 on runtime failure with a
    one-line diagnostic, 2 on usage errors."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "train" and args.seed is None:
        args.seed = args.global_seed  # train's own --seed wins over the global
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
