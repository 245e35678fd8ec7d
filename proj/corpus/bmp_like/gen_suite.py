#!/usr/bin/env python3
"""Regenerates suite.txt for bmp_like.mini.

Expected outputs are computed here, independently of the interpreter, by
modelling what the program is meant to print for each image record.
"""
import random

def palettes(ncolors):
    n = min(ncolors, 256)
    c0 = [(c * 7 + 3) % 256 for c in range(n)] + [0] * (256 - n)
    c1 = [(c * 3 + 1) % 256 for c in range(n)]
    return c0, c1

def render(w, h, bpp, grey, ncolors, pixels):
    if w <= 0 or h <= 0:
        return None
    if bpp > 8:
        return None
    c0, c1 = palettes(ncolors)
    img = [0] * (w * h * 3)
    t = 0
    for i in pixels:
        img[t] = c0[i]; t += 1
        if not grey:
            img[t] = c1[i]; t += 1
            img[t] = (c0[i] + c1[i]) % 256; t += 1
    return img

def checksum(img):
    return sum(v * (k + 1) for k, v in enumerate(img))

def record(rng, kind):
    if kind == "empty":
        return [0, rng.randint(0, 3), 8, 0], -1
    w, h = rng.randint(1, 4), rng.randint(1, 3)
    if kind == "rgb24":
        return [w, h, 24, 0, 256] + [rng.randint(0, 255) for _ in range(w * h)], -1
    ncolors = rng.randint(2, 16) if kind == "compact" else 256
    grey = 1 if kind == "grey" else 0
    pixels = [rng.randint(0, ncolors - 1) for _ in range(w * h)]
    return [w, h, 8, grey, ncolors] + pixels, checksum(render(w, h, 8, grey, ncolors, pixels))

def main():
    rng = random.Random(9171)
    kinds = ["full"] * 78 + ["compact"] * 2 + ["grey"] * 3 + ["rgb24"] * 2 + ["empty"] * 2
    lines = ["# 87 image-decoding cases for bmp_like.mini (generated by gen_suite.py)"]
    counts = {}
    for kind in kinds:
        counts[kind] = counts.get(kind, 0) + 1
        images = [kind]
        if kind == "full" and rng.random() < 0.3:
            images.append(rng.choice(["full", "grey", "rgb24"]))
        inputs, outputs = [len(images)], []
        for k in images:
            rec, out = record(rng, k)
            inputs += rec
            outputs.append(out)
        name = "%s_%02d" % (kind, counts[kind])
        lines.append("%s | input: %s | expect: %s" % (
            name, ",".join(map(str, inputs)), ",".join(map(str, outputs))))
    with open("suite.txt", "w") as f:
        f.write("\n".join(lines) + "\n")

if __name__ == "__main__":
    main()
