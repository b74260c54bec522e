"""Heavy-tailed moving averages: paths, limits and Skorokhod-type distances."""
__version__ = "0.1.0"
