#!/usr/bin/env python3
"""Regenerates resources/lexicon.tsv and resources/irregular.tsv.

Needs `wordfreq` (frequency ranking) and `lemminflect` (lemma lookup tables).
The output files are committed; the C++ build never runs this script.

The suffix rules below must stay in sync with src/nlp.cpp: an entry lands in
irregular.tsv whenever the rules disagree with the lemma lookup.
"""

import argparse
import gzip
import os
from collections import defaultdict

import lemminflect
from wordfreq import top_n_list

TAGS = ("NOUN", "PROPN", "ADJ", "VERB", "ADV", "OTHER")

CLOSED_CLASS = """
a an the this that these those my your his her its our their some any no every each either neither
all both few many much more most less least several such what which whose whatever whichever
i me you he him she it we us they them myself yourself himself herself itself ourselves themselves
who whom someone anyone everyone nobody somebody anybody everybody something anything everything nothing
and or but nor so yet for because although though while whereas if unless until since as than
of in on at by to from with without into onto upon over under above below between among through
throughout across along around about against before after during behind beneath beside besides
beyond near off out up down toward towards within via per amid inside outside past like unlike
not very too also just only even still already quite rather almost
is am are was were be been being do does did done have has had having
will would shall should can could may might must ought
there here where when why how then now
one two three four five six seven eight nine ten
""".split()

# Verbs whose surface forms are far more common as verbs in instruction text.
COMMON_VERBS = """
add make turn put give change replace remove paint draw show let keep set take bring hold wear
run walk sit stand fly swim jump look see watch play sing dance eat drink sleep read write
go come get become seem feel think know want need try use find tell ask work call move live
carry throw catch open close build create generate transform convert place cover fill
""".split()

# Domain vocabulary used by prompt text; tags fixed explicitly.
DOMAIN = {
    "NOUN": """cat dog horse bird fox owl wolf rabbit dragon robot woman man girl boy knight wizard
        castle house tower lighthouse ship boat car train tree mountain city village bridge garden
        forest beach desert star snow hill rain sunset lake space moon
        hat crown scarf umbrella lantern flower sword book cape balloon
        painting watercolor sketch photograph photo drawing art render style pixel charcoal pencil
        oil studio masterpiece quality focus lighting concept octane artstation 4k 8k 3d anime
        kitty feline puppy hound pup stallion pony steed automaton android lady gentleman
        fortress palace mansion cottage vessel automobile woodland jungle shore coast seaside
        dune peak summit town metropolis hamlet blossom bloom blade tome novel parasol lass
        illustration guitar backpack night""".split(),
    "ADJ": """red blue green yellow purple orange golden silver white black pink ancient tiny giant
        wooden glowing futuristic mysterious cute majestic detailed intricate cinematic realistic
        sharp best ultra crimson scarlet azure emerald violet gilded small little huge enormous
        old antique luminous radiant adorable lovely grand beautiful pretty gorgeous photorealistic
        sleepy fluffy happy shiny broken digital""".split(),
    "ADV": "highly extremely very".split(),
    "VERB": "trending".split(),
    "PROPN": "monet picasso rembrandt vermeer hokusai ghibli pixar disney".split(),
}


def undouble(s):
    return len(s) >= 3 and s[-1] == s[-2] and s[-1] not in "aeiouylsfz"


def cvc(s):
    v = "aeiou"
    return (len(s) >= 3 and s[-1] not in v and s[-1] not in "wxy"
            and s[-2] in v and s[-3] not in v)


def fix_stem(s):
    if undouble(s):
        return s[:-1]
    if cvc(s):
        return s + "e"
    return s


def strip_plural(w):
    if len(w) > 4 and w.endswith("ies"):
        return w[:-3] + "y"
    if len(w) > 4 and w.endswith(("ches", "shes", "sses", "xes", "zes")):
        return w[:-2]
    if len(w) > 3 and w.endswith("s") and not w.endswith(("ss", "us", "is")):
        return w[:-1]
    return None


def rule_lemma(w, tag):
    if tag == "NOUN":
        r = strip_plural(w)
        return r if r is not None else w
    if tag == "VERB":
        r = strip_plural(w)
        if r is not None:
            return r
        if len(w) > 4 and w.endswith("ied"):
            return w[:-3] + "y"
        if len(w) > 4 and w.endswith("ed"):
            return fix_stem(w[:-2])
        if len(w) > 5 and w.endswith("ing"):
            return fix_stem(w[:-3])
        return w
    if tag == "ADJ":
        if len(w) > 5 and w.endswith("iest"):
            return w[:-4] + "y"
        if len(w) > 5 and w.endswith("est"):
            return fix_stem(w[:-3])
        if len(w) > 4 and w.endswith("ier"):
            return w[:-3] + "y"
        if len(w) > 4 and w.endswith("er"):
            return fix_stem(w[:-2])
        return w
    return w


def load_lookup():
    path = os.path.join(os.path.dirname(lemminflect.__file__), "resources", "lemma_lu.csv.gz")
    lower = defaultdict(dict)   # word -> upos -> lemma
    proper = set()
    with gzip.open(path, "rt", encoding="utf-8") as f:
        for line in f:
            parts = line.rstrip("\n").split(",")
            if len(parts) != 3:
                continue
            word, upos, lemma = parts
            upos = upos.upper()
            lemma = lemma.split("/")[0]
            if word[:1].isupper():
                proper.add(word.lower())
                continue
            if upos == "AUX":
                continue
            lower[word].setdefault(upos, lemma.lower())
    return lower, proper


def choose_tag(word, options, proper):
    if word in CLOSED_CLASS:
        return "OTHER"
    if word in COMMON_VERBS:
        return "VERB"
    for tag in ("ADJ", "NOUN", "VERB", "ADV"):
        if options.get(tag) == word:
            return tag
    if "VERB" in options:
        base = options["VERB"]
        if base in COMMON_VERBS or word.endswith(("ed", "ing")):
            return "VERB"
    for tag in ("NOUN", "VERB", "ADJ", "ADV"):
        if tag in options:
            return tag
    if word in proper:
        return "PROPN"
    return None


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--top", type=int, default=9000)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "resources"))
    args = ap.parse_args()

    lookup, proper = load_lookup()
    entries = {}
    for w in top_n_list("en", args.top):
        if not w.isascii() or not w.isalpha():
            continue
        opts = lookup.get(w, {})
        # inflected forms of common verbs, e.g. "runs", "sitting"
        if w not in COMMON_VERBS and opts.get("VERB") in COMMON_VERBS and opts.get("VERB") != w:
            tag = "VERB"
        else:
            tag = choose_tag(w, opts, proper)
        if tag is not None:
            entries[w] = tag
    for v in COMMON_VERBS:
        entries[v] = "VERB"
    for tag, words in DOMAIN.items():
        for w in words:
            entries[w] = tag

    irregular = {}
    for w, tag in entries.items():
        if tag not in ("NOUN", "VERB", "ADJ"):
            continue
        gold = lookup.get(w, {}).get(tag, w)
        if not gold.isalpha():
            gold = w
        if rule_lemma(w, tag) != gold:
            irregular[(w, tag)] = gold
        # lemmas must be fixed points of the lemmatizer
        if rule_lemma(gold, tag) != gold:
            irregular[(gold, tag)] = gold

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "lexicon.tsv"), "w", encoding="utf-8") as f:
        for w in sorted(entries):
            f.write(f"{w}\t{entries[w]}\n")
    with open(os.path.join(args.out, "irregular.tsv"), "w", encoding="utf-8") as f:
        for (w, tag) in sorted(irregular):
            f.write(f"{w}\t{irregular[(w, tag)]}\t{tag}\n")
    print(f"lexicon: {len(entries)} entries, irregular: {len(irregular)} entries")


if __name__ == "__main__":
    main()
