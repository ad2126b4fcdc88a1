import random

from bsgroups.words import BSParams, Word, relator, word_inv, word_mul


def random_word(rng: random.Random, max_letters: int, max_exp: int = 3) -> Word:
    syl = []
    letters = 0
    gen = rng.choice("ab")
    target = rng.randint(0, max_letters)
    while letters < target:
        e = rng.randint(1, min(max_exp, target - letters)) * rng.choice((1, -1))
        syl.append((gen, e))
        letters += abs(e)
        gen = "b" if gen == "a" else "a"
    return Word.from_syllables(syl)


def insert_relators(rng: random.Random, w: Word, g: BSParams, count: int = 2) -> Word:
    """Insert conjugates u r^(+-1) u^-1 of the relator at random syllable boundaries."""
    r = relator(g)
    for _ in range(count):
        u = random_word(rng, 4)
        rr = r if rng.random() < 0.5 else word_inv(r)
        piece = word_mul(word_mul(u, rr), word_inv(u))
        cut = rng.randint(0, len(w.syllables))
        left = Word.from_syllables(w.syllables[:cut])
        right = Word.from_syllables(w.syllables[cut:])
        w = word_mul(word_mul(left, piece), right)
    return w
