"""Regular string transductions: two-way machines and MSO definable
transductions, with the conversions between them."""

__version__ = "0.1.0"
