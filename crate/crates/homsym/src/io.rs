//! File formats: model JSON, dataset CSV, reports, PGM images.
