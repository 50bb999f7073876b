"""Smishing (SMS phishing) detection with lingo normalization and
document-frequency Naive Bayes."""

__version__ = "0.1.0"
