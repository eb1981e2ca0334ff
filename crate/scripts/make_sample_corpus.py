"""Writes the bundled synthetic sample corpus used by the CLI demo and tests.

Usage: python3 scripts/make_sample_corpus.py crates/cli/data/sample_corpus.jsonl
"""

import json
import random
import sys

MARKET = """stocks shares index dow nasdaq earnings rates fed inflation bonds yields
traders investors portfolio dividend futures oil gold dollar economy recession
quarter revenue guidance valuation tech banks sector selloff rebound volatility
treasury crypto bitcoin etf hedge fund ipo merger buyback options margin broker
wallstreet nyse chart support resistance gains bulls bears bubble credit debt
jobs payrolls gdp cpi tariffs exports retail housing mortgage""".split()

VACCINE = """vaccine vaccines dose doses booster shot shots pfizer moderna jab
clinic pharmacy appointment immunity antibodies variant omicron delta covid virus
pandemic trial trials fda cdc approval rollout mandate masks hospital nurses
doctors patients symptoms fever arm side effects efficacy mrna lab study data
cases outbreak testing quarantine school kids elderly clinics supply vial
injection immunization public health officials""".split()

SHARED = """the a to of and in on for is it this that with my our we you they
today now just new week people time day year back about after from more
really still going get got see think know make than""".split()

POSITIVE = """great good amazing excellent love happy strong success win hope
relief safe effective thankful grateful excited proud best awesome nice
healthy protected bullish profit rally""".split()

NEGATIVE = """terrible bad awful worst hate fear panic crash loss losses sick
pain worried scared angry disaster dangerous failed sad tired bearish
risky nightmare wrong""".split()

NEGATORS = ["not", "never", "no"]
ABUSIVE = ["idiot", "moron", "stupid"]


def tweet(rng, topic):
    bank, other, keyword = (MARKET, VACCINE, "market") if topic == "M" else (VACCINE, MARKET, "vaccine")
    tone = rng.choices(["pos", "neg", "neutral"], [0.4, 0.4, 0.2])[0]
    # Topics overlap: a share of the topical words come from the other bank.
    words = [rng.choice(bank if rng.random() < 0.7 else other) for _ in range(rng.randint(2, 4))]
    words += [rng.choice(SHARED) for _ in range(rng.randint(3, 6))]
    if rng.random() < 0.75:
        words.append(keyword)
    if tone != "neutral":
        pool = POSITIVE if tone == "pos" else NEGATIVE
        words += [rng.choice(pool) for _ in range(rng.randint(1, 3))]
    rng.shuffle(words)
    if rng.random() < 0.08:
        i = rng.randrange(len(words))
        words.insert(i, rng.choice(NEGATORS))
    if rng.random() < 0.05:
        words.append(rng.choice(ABUSIVE))
    if rng.random() < 0.15:
        words.append("#" + rng.choice(bank))
    if rng.random() < 0.1:
        words.insert(0, "@" + rng.choice(["newsdesk", "jdoe", "healthwatch", "tradebot"]))
    text = " ".join(words)
    text = text[0].upper() + text[1:]
    text += rng.choice([".", "!", "!!", "?", "", "..."])
    if rng.random() < 0.03:
        text += " https://example.com/" + str(rng.randrange(1000))
    return text


def main(path):
    rng = random.Random(2024)
    with open(path, "w") as out:
        for i in range(400):
            topic = "M" if i % 2 == 0 else "V"
            out.write(json.dumps({"id": i, "text": tweet(rng, topic), "topic": topic}) + "\n")


if __name__ == "__main__":
    main(sys.argv[1])
