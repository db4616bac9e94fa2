from ._dis2vec import (
    ArgumentError,
    Corpus,
    Document,
    EmptyCorpusError,
    EmptyVocabError,
    Error,
    InputError,
    ParseError,
    Sentence,
    TrainingError,
    UndefinedMetricError,
    ValidationError,
    classification_metrics,
    clustering_metrics,
    cohen_kappa,
    kmeans,
    load_corpus,
    load_vectors,
    pagerank,
    retrofit,
    rouge_1,
    run,
    split_sentences,
    tokenize,
    train_variants,
)

__all__ = [name for name in dir() if not name.startswith("_")]
