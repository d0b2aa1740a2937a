"""Weight-container data-stealing and defense toolkit."""
