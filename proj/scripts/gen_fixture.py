#!/usr/bin/env python3
"""Regenerates the bundled fixture dataset under data/fixture.

Synthetic but shaped like the real inputs: case curves follow the same
exponential-growth law the estimator assumes, tweet volumes track cases with
a five-day lead, and tweet text is drawn from per-category word pools so the
classifier fixture and the pipeline fixture share a vocabulary.
"""

import json
import math
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.normpath(os.path.join(HERE, "..", "data", "fixture"))
STOPWORDS = os.path.normpath(os.path.join(HERE, "..", "data", "stopwords"))

START = (2020, 2, 15)
N_DAYS = 61  # 2020-02-15 .. 2020-04-15 inclusive
LEAD = 5     # tweet volume leads cases by this many days
SERIAL = 7.0

rng = random.Random(20200215)


def date_str(day_index):
    import datetime
    d = datetime.date(*START) + datetime.timedelta(days=day_index)
    return d.isoformat()


# ---------------------------------------------------------------- case curves

# (name, country, k0, peak_end_day, fast_decline, volume_scale, in_gr)
SUBREGIONS = [
    ("Luxembourg",                  "Luxembourg", 12, 20, "lu",   True),
    ("Wallonia, Belgium",           "Belgium",    12, 20, "gr",   True),
    ("Saarland, Germany",           "Germany",     8, 20, "gr",   True),
    ("Rhineland-Palatinate, Germany", "Germany",  10, 20, "gr",   True),
    ("Lorraine, France",            "France",      8, 20, "gr",   True),
    ("Flanders, Belgium",           "Belgium",    40, 20, "slow", False),
    ("Ile-de-France, France",       "France",     45, 20, "slow", False),
    ("Bavaria, Germany",            "Germany",    40, 20, "slow", False),
]

DECLINE = {
    # per-day R decline through three phases: (to 1.3, to 0.95, floor)
    "lu":   (0.27, 0.045, 0.020),
    "gr":   (0.18, 0.045, 0.020),
    "slow": (0.068, 0.068, 0.020),
}


def r_profile(peak_end, mode):
    d1, d2, d3 = DECLINE[mode]
    rs = []
    r = 2.9
    for day in range(N_DAYS + LEAD + 2):
        rs.append(r)
        if day < peak_end:
            continue
        if r > 1.3:
            r = max(1.29, r - d1)
        elif r > 0.95:
            r = r - d2
        else:
            r = max(0.72, r - d3)
    return rs


def phase_days(rs):
    """(first day R < 2.5, first day R < 1) of a profile."""
    band = next(i for i, r in enumerate(rs) if r < 2.5)
    low = next(i for i, r in enumerate(rs) if r < 1.0)
    return band, low


def case_curve(k0, rs):
    ks = [float(k0)]
    for t in range(1, len(rs)):
        ks.append(ks[-1] * math.exp((rs[t] - 1.0) / SERIAL))
    return ks


# Country-level day-to-day reporting noise. The same factor multiplies both
# the published case counts and (five days earlier) the tweet volume, which is
# exactly the shared signal the lag scan locks onto.
COUNTRY_NOISE = {}


def reporting_noise(country, day):
    series = COUNTRY_NOISE.setdefault(country, {})
    if day not in series:
        series[day] = max(-0.3, min(0.3, rng.gauss(0.0, 0.10)))
    return series[day]


curves = {}
for name, country, k0, peak_end, mode, in_gr in SUBREGIONS:
    curves[name] = case_curve(k0, r_profile(peak_end, mode))

# ------------------------------------------------------------------ word pools

CATEGORY_POOLS = {
    1: ["wuhan", "china", "chinese", "beijing", "hubei", "outbreak", "origin",
        "market", "epicenter", "evacuation", "repatriation", "cruise"],
    2: ["mask", "masks", "symptoms", "fever", "cough", "hygiene", "handwashing",
        "treatment", "vaccine", "testing", "quarantine", "disinfect", "sanitizer",
        "distancing"],
    3: ["cases", "deaths", "hospital", "local", "region", "municipality", "mayor",
        "update", "daily", "reported", "toll", "icu"],
    4: ["italy", "spain", "global", "world", "international", "pandemic", "europe",
        "america", "flights", "embassy", "summit"],
    5: ["lockdown", "border", "borders", "closure", "school", "schools", "work",
        "home", "curfew", "commuters", "travel", "restrictions", "permit",
        "economy", "shops", "confinement", "frontière", "grenze", "teleworking"],
    6: ["racism", "discrimination", "xenophobia", "stigma", "hate", "prejudice",
        "scapegoating"],
    7: ["weather", "football", "music", "birthday", "coffee", "weekend", "series",
        "recipes", "garden", "sunshine"],
}

COMMON_POOL = ["people", "government", "news", "crisis", "spread", "virus",
               "situation", "numbers", "staying", "weeks", "country", "official"]

FLAVOR = {
    "France":     ["école", "gouvernement", "masque", "santé"],
    "Germany":    ["schule", "maske", "bundesland", "heimarbeit"],
    "Belgium":    ["school", "maatregelen", "gezondheid", "brussels"],
    "Luxembourg": ["schoul", "lëtzebuerg", "grenzgänger", "santé"],
}

# phase -> category weights (categories 1..7)
PHASE_WEIGHTS = {
    "early":    [55, 5, 5, 20, 5, 5, 5],
    "early_gr": [40, 12, 4, 18, 16, 4, 6],   # measures + policy earlier in GR/LU
    "prepeak":  [25, 15, 12, 18, 18, 5, 7],
    "prepeak_gr": [15, 25, 10, 14, 26, 4, 6],
    "band":     [8, 10, 22, 15, 32, 5, 8],
    "band_lu":  [5, 8, 10, 10, 55, 4, 8],
    "decay":    [6, 8, 18, 14, 36, 6, 12],
    "decay_lu": [4, 6, 10, 10, 55, 5, 10],
}


def phase_of(day, country, in_gr):
    first_case = 6 if in_gr or country == "Luxembourg" else 2
    if day < first_case:
        return "early_gr" if in_gr else "early"
    if day < 15:
        return "prepeak_gr" if in_gr else "prepeak"
    if day < 30:
        return "band_lu" if country == "Luxembourg" else "band"
    return "decay_lu" if country == "Luxembourg" else "decay"


def pick_category(weights):
    total = sum(weights)
    u = rng.uniform(0, total)
    acc = 0
    for i, w in enumerate(weights):
        acc += w
        if u < acc:
            return i + 1
    return 7


def make_words(category, country, n):
    pool = CATEGORY_POOLS[category]
    words = [rng.choice(pool) for _ in range(max(4, n - 3))]
    for _ in range(2):
        words.append(rng.choice(COMMON_POOL))
    if rng.random() < 0.35:
        words.append(rng.choice(FLAVOR[country]))
    rng.shuffle(words)
    return words


def decorate(words):
    text = " ".join(words)
    r = rng.random()
    if r < 0.25:
        text = "RT @user%04d: %s" % (rng.randrange(10000), text)
    if rng.random() < 0.3:
        text += " #covid"
    elif rng.random() < 0.3:
        text = "coronavirus " + text
    if rng.random() < 0.2:
        text += " https://t.co/%06x" % rng.randrange(16**6)
    if rng.random() < 0.1:
        text += " 2020"
    return text


# ------------------------------------------------------------------- gazetteer

CITIES = {
    "Luxembourg": ["Luxembourg City", "Esch-sur-Alzette", "Differdange"],
    "Wallonia, Belgium": ["Liège", "Namur", "Charleroi"],
    "Saarland, Germany": ["Saarbrücken", "Völklingen"],
    "Rhineland-Palatinate, Germany": ["Mainz", "Koblenz", "Trier"],
    "Lorraine, France": ["Metz", "Nancy", "Thionville", "Moselle"],
    "Flanders, Belgium": ["Antwerp", "Ghent"],
    "Ile-de-France, France": ["Paris"],
    "Bavaria, Germany": ["Munich"],
}


def fold(s):
    table = {"é": "e", "è": "e", "ê": "e", "ë": "e", "à": "a", "â": "a",
             "ô": "o", "ö": "o", "ü": "u", "û": "u", "ù": "u", "ç": "c",
             "ï": "i", "î": "i", "ß": "ss", "ä": "a"}
    return "".join(table.get(c, c) for c in s.lower())


def write_gazetteer():
    rows = [("pattern", "canonical", "priority")]
    seen = set()

    def add(pattern, canonical, priority=0):
        key = (fold(pattern), canonical)
        if key in seen:
            return
        seen.add(key)
        rows.append((fold(pattern), canonical, str(priority)))

    for sub, cities in CITIES.items():
        country = sub.split(", ")[-1]
        for city in cities:
            canonical = "%s, %s" % (city, sub)
            add(city, canonical)
            add(canonical, canonical)  # canonical strings normalize to themselves
            if country != sub:
                add("%s, %s" % (city, country), canonical)
        add(sub, sub)
    for country in ["France", "Germany", "Belgium"]:
        add(country, country)
    # ambiguous name: the country wins on priority
    add("Luxembourg", "Luxembourg", 1)
    add("Berlin", "Berlin, Germany")
    add("Berlin, Germany", "Berlin, Germany")
    with open(os.path.join(OUT, "gazetteer.tsv"), "w", encoding="utf-8", newline="\n") as f:
        for r in rows:
            f.write("\t".join(r) + "\n")


GEO_STYLES = ["plain", "upper", "with_country", "folded"]


def geo_original(city, sub):
    style = rng.choice(GEO_STYLES)
    if style == "upper":
        return city.upper()
    if style == "with_country":
        country = sub.split(", ")[-1] if ", " in sub else sub
        return "%s, %s" % (city, country)
    if style == "folded":
        return fold(city)
    return city


# --------------------------------------------------------------------- emitters


def write_regions():
    spec = {
        "regions": [
            {"name": "GR", "members": ["Luxembourg", "Wallonia, Belgium",
                                        "Saarland, Germany",
                                        "Rhineland-Palatinate, Germany",
                                        "Lorraine, France"]},
            {"name": "Luxembourg", "members": ["Luxembourg"]},
            {"name": "Belgium", "members": ["Belgium"]},
            {"name": "France", "members": ["France"]},
            {"name": "Germany", "members": ["Germany"]},
        ]
    }
    with open(os.path.join(OUT, "regions.json"), "w", encoding="utf-8", newline="\n") as f:
        json.dump(spec, f, indent=2, ensure_ascii=False)
        f.write("\n")


def write_cases():
    lines = ["date,region,new_cases,deaths"]
    for name, country, k0, peak_end, mode, in_gr in SUBREGIONS:
        ks = curves[name]
        for day in range(N_DAYS):
            value = max(1, round(ks[day] * (1.0 + reporting_noise(country, day))))
            # Lorraine has no usable data before 2020-03-18 (day 32); the rows
            # exist with placeholder values so the zero-fill rule has work to do
            if name == "Lorraine, France" and day < 32:
                value = max(1, value // 3)
            if name == "Ile-de-France, France" and day == 55:
                value = -7  # data revision day
            deaths = max(0, round(value * 0.02))
            lines.append("%s,\"%s\",%d,%d" % (date_str(day), name, value, deaths))
    with open(os.path.join(OUT, "cases.csv"), "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def subregion_volume(name, country, mode, peak_end):
    """Daily tweet volume: proportional to the cases five days ahead through
    the pre-peak rise (including the shared reporting noise, which carries the
    lead signal), a noisy plateau while R sits in the growth band, and a
    decline through the decay period."""
    ks = curves[name]
    band_day, low_day = phase_days(r_profile(peak_end, mode))
    # Lorraine stays a small contributor: its reporting noise is absent from
    # the zero-filled GR case series, so its tweet share stays low too
    plateau = 8.0 if name == "Lorraine, France" else 20.0
    scale = plateau / max(1.0, ks[band_day + LEAD])
    out = []
    for day in range(N_DAYS):
        if day < band_day:
            v = scale * ks[day + LEAD] * (1.0 + reporting_noise(country, day + LEAD))
        elif day < low_day:
            v = plateau * (1.0 + rng.uniform(-0.15, 0.15))
        else:
            drop = max(0.15, 1.0 - 0.035 * (day - low_day))
            v = plateau * drop * (1.0 + rng.uniform(-0.12, 0.12))
        out.append(max(0, min(25, round(v))))
    return out


def write_tweets_and_labels():
    tweets = []
    tid = 0
    users = {}
    for name, country, k0, peak_end, mode, in_gr in SUBREGIONS:
        cities = CITIES[name]
        pool_size = 40
        users[name] = ["u%s%03d" % (fold(cities[0])[:4], i) for i in range(pool_size)]
        volumes = subregion_volume(name, country, mode, peak_end)
        for day in range(N_DAYS):
            volume = volumes[day]
            for _ in range(volume):
                tid += 1
                category = pick_category(PHASE_WEIGHTS[phase_of(day, country, in_gr)])
                words = make_words(category, country, rng.randrange(8, 13))
                city = rng.choice(cities)
                rec = {
                    "tweet_id": "t%06d" % tid,
                    "full_text": decorate(words),
                    "user_id": rng.choice(users[name]),
                    "user_geo_original": geo_original(city, name),
                    "date": date_str(day),
                }
                tweets.append(rec)
    # a handful of records that match no gazetteer entry or lack a location
    for extra in range(12):
        tid += 1
        words = make_words(pick_category(PHASE_WEIGHTS["prepeak"]), "France", 9)
        rec = {
            "tweet_id": "t%06d" % tid,
            "full_text": decorate(words),
            "user_id": "uwild%03d" % extra,
            "date": date_str(rng.randrange(N_DAYS)),
        }
        if extra % 3 != 0:
            rec["user_geo_original"] = rng.choice(["Atlantis", "Mars", "somewhere nice", ""])
        tweets.append(rec)

    with open(os.path.join(OUT, "tweets.jsonl"), "w", encoding="utf-8", newline="\n") as f:
        for rec in tweets:
            f.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")

    # labeled topics: same pools, imbalanced classes
    counts = {1: 80, 2: 45, 3: 55, 4: 50, 5: 75, 6: 20, 7: 30}
    countries = ["GR", "Luxembourg", "Belgium", "France", "Germany"]
    lines = ["top_words,country,category"]
    for category, n in counts.items():
        for _ in range(n):
            country = rng.choice(countries)
            flavor_country = country if country in FLAVOR else "Luxembourg"
            words = [rng.choice(CATEGORY_POOLS[category]) for _ in range(7)]
            words += [rng.choice(COMMON_POOL) for _ in range(2)]
            if rng.random() < 0.3:
                words.append(rng.choice(FLAVOR[flavor_country]))
            else:
                words.append(rng.choice(COMMON_POOL))
            uniq = []
            for w in words:
                if w not in uniq:
                    uniq.append(w)
            lines.append("\"%s\",%s,%d" % (" ".join(uniq), country, category))
    with open(os.path.join(OUT, "labeled_topics.csv"), "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


STOPWORD_SETS = {
    "en": """a about above after again all am an and any are as at be because been
    before being below between both but by did do does doing down during each few
    for from further had has have having he her here hers him his how i if in into
    is it its just me more most my no nor not now of off on once only or other our
    out over own same she so some such than that the their them then there these
    they this those through to too under until up very was we were what when where
    which while who whom why will with you your""",
    "fr": """au aux avec ce ces dans de des du elle en et eux il ils je la le les
    leur lui ma mais me même mes moi mon ne nos notre nous on ou où par pas pour
    qu que qui sa se ses son sur ta te tes toi ton tu un une vos votre vous""",
    "de": """aber alle als also am an auch auf aus bei bin bis bist da damit dann
    das dass dein deine dem den der des dessen die dies diese dir doch dort du
    durch ein eine einem einen einer eines er es euer eure für hatte haben hat
    hier hinter ich ihr ihre im in ist ja jede jedem jeden jeder jedes kann kein
    können mein meine mit muss nach nicht noch nun nur oder ohne sehr sein seine
    sich sie sind so über um und uns unser unter vom von vor war was weiter wenn
    werde werden wie wieder wir wird zu zum zur""",
    "nl": """aan al alles als altijd andere ben bij daar dan dat de der deze die
    dit doch doen door dus een eens en er ge geen geweest haar had heb hebben
    heeft hem het hier hij hoe hun iemand iets ik in is ja je kan kon kunnen maar
    me meer men met mij mijn moet na naar niet niets nog nu of om omdat onder ons
    ook op over reeds te tegen toch toen tot u uit uw van veel voor want waren
    was wat werd wezen wie wil worden wordt zal ze zelf zich zij zijn zo zonder zou""",
}


def write_stopwords():
    os.makedirs(STOPWORDS, exist_ok=True)
    for lang, words in STOPWORD_SETS.items():
        with open(os.path.join(STOPWORDS, "%s.txt" % lang), "w", encoding="utf-8",
                  newline="\n") as f:
            for w in sorted(set(words.split())):
                f.write(w + "\n")


def write_lexicons():
    dictionary = {
        "lockdown": 5000, "border": 4000, "quarantine": 3500, "symptoms": 3000,
        "mask": 4500, "hospital": 4200, "vaccine": 2500, "testing": 2600,
        "school": 3900, "travel": 3700, "cases": 5200, "deaths": 3100,
        "world": 4800, "home": 5100, "work": 4600, "news": 4400,
    }
    with open(os.path.join(OUT, "dictionary.tsv"), "w", encoding="utf-8", newline="\n") as f:
        f.write("word\tfrequency\n")
        for w, c in sorted(dictionary.items()):
            f.write("%s\t%d\n" % (w, c))

    lexicon = {
        "lockdown": "noun", "wuhan": "noun", "border": "noun", "school": "noun",
        "hospital": "noun", "mask": "noun", "go": "verb", "stay": "verb",
        "close": "verb", "report": "verb", "quickly": "adv", "daily": "adv",
        "nice": "adj", "global": "adj", "the": "det", "of": "prep", "and": "conj",
        "oh": "intj",
    }
    with open(os.path.join(OUT, "pos_lexicon.tsv"), "w", encoding="utf-8", newline="\n") as f:
        f.write("word\ttag\n")
        for w, t in sorted(lexicon.items()):
            f.write("%s\t%s\n" % (w, t))


def write_config():
    cfg = """# Fixture pipeline configuration. Paths are relative to this file.

[run]
seed = 42
study_start = "2020-02-15"
study_end = "2020-04-15"

[ingest]
tweets = "tweets.jsonl"
tweets_format = "jsonl"
cases = "cases.csv"
gazetteer = "gazetteer.tsv"
regions = "regions.json"
strict = false
zero_fill = ["Lorraine, France=2020-03-18"]

[epi]
smooth_window = 7
smooth_sigma = 2.0
sigma_rw = 0.15
serial_interval = 7.0

[corr]
lag_min = -10
lag_max = 5

[textprep]
stopwords_dir = "../stopwords"

[topics]
k = 4
gamma = 0.5
lda_iterations = 150
embedding_dim = 32
latent_dim = 16
epochs = 60
min_docs_per_day = 5

[classify]
labeled_topics = "labeled_topics.csv"
folds = 10

[report]
plot_region = "GR"
"""
    with open(os.path.join(OUT, "fixture.toml"), "w", encoding="utf-8", newline="\n") as f:
        f.write(cfg)


def main():
    os.makedirs(OUT, exist_ok=True)
    write_gazetteer()
    write_regions()
    write_cases()
    write_tweets_and_labels()
    write_stopwords()
    write_lexicons()
    write_config()
    total = sum(1 for _ in open(os.path.join(OUT, "tweets.jsonl"), encoding="utf-8"))
    print("fixture written: %d tweets" % total)


if __name__ == "__main__":
    main()
