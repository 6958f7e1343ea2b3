"""Item-by-item judgement of recommendations against a sampled profile.

Every reset draws a fresh viewer profile (media type, era, genres, rating);
each recommended title is matched against the bundled catalog and judged
field by field.
"""

import langfeed as lf
from langfeed.envs.recommend import default_catalog, item_violations, PreferenceProfile

env = lf.make(lf.EnvConfig(env_id="reco_movie", seed=12))
bundle = env.reset()
print("THE VIEWER SAYS:", bundle.instruction, "\n")

catalog = default_catalog()
profile = PreferenceProfile(
    media_type=env.profile.media_type,
    year_range=env.profile.year_range,
    genres=env.profile.genres,
    age_restriction=env.profile.age_restriction,
)

# Recommend one genuinely matching item and one guaranteed mismatch.
good = next(i.title for i in catalog.items if not item_violations(profile, i))
bad = next(
    i.title for i in catalog.items if len(item_violations(profile, i)) >= 2
)
outcome = env.step(f"{good}\n{bad}\nSomething Imaginary")
print("RECOMMENDED:", good, "|", bad, "| Something Imaginary")
print("feedback:")
print(outcome.bundle.feedback)
print("\nreward (evaluation channel):", outcome.reward)
