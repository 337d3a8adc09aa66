#!/usr/bin/env python3
# Longhand CIDEr / BLEU reference values for the metric fixtures in
# tests/metrics_test.cc. Written independently of the C++ scorer: plain
# dict counting, no shared code. Run it and paste the printed values.
import math
from collections import Counter


def ngrams(seq, k):
    return Counter(tuple(seq[i:i + k]) for i in range(len(seq) - k + 1))


def fit_df(corpus):
    df = Counter()
    for refs in corpus:
        seen = set()
        for r in refs:
            for k in range(1, 5):
                seen.update(ngrams(r, k).keys())
        df.update(seen)
    return df, len(corpus)


def cider(cand, refs, df, n_img):
    def vec(seq, k):
        return {g: c * (math.log(n_img) - math.log(max(1, df[g])))
                for g, c in ngrams(seq, k).items()}
    total = 0.0
    for k in range(1, 5):
        vc = vec(cand, k)
        nc = math.sqrt(sum(v * v for v in vc.values()))
        acc = 0.0
        for r in refs:
            vr = vec(r, k)
            nr = math.sqrt(sum(v * v for v in vr.values()))
            num = sum(min(vc[g], vr[g]) * vr[g] for g in vc if g in vr)
            acc += num / (nc * nr) if nc > 0 and nr > 0 else 0.0
        total += acc / len(refs)
    return 10.0 * total / 4


def bleu(cand, refs, max_order=4):
    c = len(cand)
    if c == 0:
        return [0.0] * max_order
    rl = min((abs(len(r) - c), len(r)) for r in refs)[1]
    bp = 1.0 if c >= rl else math.exp(1 - rl / c)
    precs = []
    for k in range(1, max_order + 1):
        cc = ngrams(cand, k)
        mx = Counter()
        for r in refs:
            for g, n in ngrams(r, k).items():
                mx[g] = max(mx[g], n)
        clipped = sum(min(n, mx[g]) for g, n in cc.items())
        tot = max(c - k + 1, 0)
        precs.append(clipped / tot if tot else 0.0)
    out = []
    for k in range(1, max_order + 1):
        if any(p == 0 for p in precs[:k]):
            out.append(0.0)
        else:
            out.append(bp * math.exp(sum(math.log(p) for p in precs[:k]) / k))
    return out


# token ids: 3=a 4=b 5=c 6=d 7=e 8=f 9=g
A = [[3, 4, 5], [3, 4, 6]]
B = [[7, 8], [3, 7, 9]]
C = [[5, 6, 7, 8], [9, 3]]
df2, n2 = fit_df([A, B])
df3, n3 = fit_df([A, B, C])
print("df2", {k: v for k, v in df2.items() if len(k) == 1})
print("cider_2img_full_ref   %.17g" % cider([3, 4, 5], A, df2, n2))
print("cider_2img_partial    %.17g" % cider([3, 4], A, df2, n2))
print("cider_2img_other      %.17g" % cider([7, 8, 3], B, df2, n2))
print("cider_3img_long       %.17g" % cider([3, 4, 6, 7, 8, 9], A, df3, n3))
print("cider_3img_repeat     %.17g" % cider([5, 6, 5, 6], C, df3, n3))
print("cider_3img_unseen     %.17g" % cider([3, 4, 5, 10], A, df3, n3))
print("bleu_8tok", ["%.17g" % v for v in bleu([3, 4, 5, 6, 3, 4, 7, 8], [[3, 4, 5, 6, 7, 8], [9, 3, 4, 7, 8, 5, 6]])])
print("bleu_short", ["%.17g" % v for v in bleu([3, 4, 5], [[3, 4, 5, 6, 7]])])
print("bleu_repeat", ["%.17g" % v for v in bleu([3, 3, 3, 3], [[3, 4, 3, 5]])])
print("bleu_long", ["%.17g" % v for v in bleu([3, 4, 5, 6, 7, 8, 9], [[3, 4, 5], [4, 5, 6, 7]])])
print("bleu_tie", ["%.17g" % v for v in bleu([3, 4, 5, 6], [[3, 4, 5], [3, 4, 5, 6, 7]])])
