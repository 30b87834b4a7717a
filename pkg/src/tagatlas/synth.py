"""Deterministic synthetic corpora.

Two generators: a controlled two-topic corpus used as a training oracle
(topic structure is known, so embedding quality is checkable), and a
messy 10k-tweet demo corpus for exercising the full pipeline. The demo
corpus plants sentinel ids, handles, and a sentinel phrase so tests can
prove none of it leaks into models, atlases, or API responses.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

SHARED_WORDS = ["the", "a", "to", "and", "of", "in", "on", "for", "is", "at",
                "with", "we", "are", "this", "now", "just", "still", "again",
                "tonight", "today"]

# six topical pools, pairwise disjoint; the first 25 words of each also
# serve as that topic's hashtags
TOPIC_WORDS = {
    "storm": ["hurricane", "storm", "landfall", "surge", "winds", "gusts",
              "rainfall", "downpour", "shelter", "evacuate", "coastline",
              "sandbags", "curfew", "forecast", "category", "eyewall",
              "track", "drenched", "batten", "gale", "squall", "barometer",
              "pier", "marina", "tide", "swell", "awning", "plywood"],
    "fire": ["wildfire", "blaze", "smoke", "embers", "acres", "containment",
             "firefighters", "airtanker", "ridge", "canyon", "brush",
             "flames", "scorched", "ash", "perimeter", "hotshots",
             "retardant", "fireline", "windshift", "drought", "tinder",
             "charred", "lookout", "helitack", "backburn", "fuelbreak",
             "smokejumper", "evacuations"],
    "quake": ["earthquake", "aftershock", "magnitude", "epicenter", "tremor",
              "seismic", "rubble", "collapsed", "fault", "richter",
              "shaking", "aftermath", "rescue", "searchdogs", "debris",
              "masonry", "retrofit", "liquefaction", "foreshock", "tsunami",
              "seismograph", "gasleak", "sirens", "triage", "cracked",
              "toppled", "trapped", "drill"],
    "flood": ["flood", "flash", "river", "crest", "overflow", "inundated",
              "levees", "swiftwater", "floodplain", "runoff", "culvert",
              "spillway", "submerged", "waders", "bailing", "mudslide",
              "washout", "torrent", "creek", "gauge", "sodden", "pumping",
              "basement", "drainage", "watershed", "downstream", "upstream",
              "sandbagging"],
    "vigil": ["vigil", "memorial", "candles", "mourning", "tribute",
              "solidarity", "donate", "blooddrive", "victims", "heroes",
              "prayers", "community", "healing", "remembrance", "flowers",
              "anthem", "silence", "bells", "procession", "fundraiser",
              "counselors", "unity", "strength", "togetherness", "gratitude",
              "volunteers", "comfort", "hope"],
    "grid": ["blackout", "outages", "substation", "transformer", "linemen",
             "restoration", "generators", "voltage", "powerlines", "utility",
             "crews", "repairs", "circuits", "breaker", "megawatts",
             "rolling", "brownout", "flashlight", "batteries", "candlelight",
             "freezers", "thaw", "spoilage", "chainsaw", "poles", "feeders",
             "clearing", "restored"],
}
HASHTAGS_PER_TOPIC = 25

SENTINEL_ID = "881234567890123456"
SENTINEL_HANDLE = "vx_probe_handle"
SENTINEL_PHRASE = "quartz umbrella parade nine"


TOPIC_A_TAGS = ["#kestrel", "#mango", "#violet"]
TOPIC_B_TAGS = ["#walnut", "#cobalt", "#osprey"]


def two_topic_corpus(seed: int = 0) -> list[list[str]]:
    """1000 token lists: 2 topics x 500 tweets, 3 hashtags each, disjoint
    50-word vocabularies, 20 shared function words.

    Hashtag names share no character n-grams within or across topics, so
    similarity between them can only come from co-occurrence, not from
    shared subword buckets."""
    rng = np.random.default_rng(seed)
    tweets = []
    for topic, tags in (("a", TOPIC_A_TAGS), ("b", TOPIC_B_TAGS)):
        words = [f"{topic}word{i:02d}" for i in range(50)]
        for _ in range(500):
            toks = [words[rng.integers(50)] for _ in range(rng.integers(8, 15))]
            toks += [SHARED_WORDS[rng.integers(20)] for _ in range(rng.integers(2, 5))]
            toks += [tags[rng.integers(3)] for _ in range(rng.integers(1, 3))]
            order = rng.permutation(len(toks))
            tweets.append([toks[i] for i in order])
    order = rng.permutation(len(tweets))
    return [tweets[i] for i in order]


def _demo_tweet(rng: np.random.Generator, topic: str) -> str:
    words = TOPIC_WORDS[topic]
    parts = []
    if rng.random() < 0.12:
        parts.append(f"RT @relay_{rng.integers(1000):03d}:")
    for _ in range(int(rng.integers(6, 15))):
        w = words[rng.integers(len(words))]
        r = rng.random()
        if r < 0.06:
            w = w.upper()
        elif r < 0.14:
            w = w.capitalize()
        if rng.random() < 0.12:
            w += ["!", ",", "...", "?"][rng.integers(4)]
        parts.append(w)
    for _ in range(int(rng.integers(0, 3))):
        parts.append(SHARED_WORDS[rng.integers(len(SHARED_WORDS))])
    if rng.random() < 0.25:
        parts.append(f"@user_{rng.integers(10**6):06d}")
    if rng.random() < 0.2:
        parts.append(f"https://t.example/{rng.integers(10**8):08x}")
    ntags = int(rng.integers(1, 4))
    for _ in range(ntags):
        t = words[rng.integers(HASHTAGS_PER_TOPIC)]
        parts.append("#" + (t.capitalize() if rng.random() < 0.2 else t))
    order = rng.permutation(len(parts) - 1) + 1  # keep any RT prefix first
    return " ".join([parts[0]] + [parts[i] for i in order])


def write_demo_corpus(path: str | Path, n_tweets: int = 10000, seed: int = 7) -> dict:
    """JSONL corpus of n_tweets plus a handful of malformed lines and the
    privacy sentinels. Returns summary counts."""
    topics = list(TOPIC_WORDS)
    rng = np.random.default_rng(seed)
    malformed = 0
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(n_tweets):
            tid = str(881000000000000000 + i * 7919 + int(rng.integers(7919)))
            topic = topics[rng.integers(len(topics))]
            if i == 137:
                obj = {"id_str": SENTINEL_ID,
                       "text": f"{SENTINEL_PHRASE} @{SENTINEL_HANDLE} #once"}
            elif rng.random() < 0.001:
                fh.write('{"id_str": "%s", "text": truncated\n' % tid)
                malformed += 1
                continue
            elif rng.random() < 0.3:
                obj = {"id_str": tid,
                       "extended_tweet": {"full_text": _demo_tweet(rng, topic)},
                       "text": "truncated..."}
            else:
                obj = {"id_str": tid, "text": _demo_tweet(rng, topic)}
            fh.write(json.dumps(obj) + "\n")
    return {"tweets": n_tweets - malformed, "malformed": malformed,
            "hashtags": len(topics) * HASHTAGS_PER_TOPIC}
