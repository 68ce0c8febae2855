import hypothesis

# Derandomized so CI runs are reproducible; the suite also uses explicit
# splitmix64 seeds everywhere it draws random trees.
hypothesis.settings.register_profile(
    "ci", derandomize=True, max_examples=50, deadline=None
)
hypothesis.settings.load_profile("ci")
