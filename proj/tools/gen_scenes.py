#!/usr/bin/env python3
"""Regenerates the bundled scene corpus under scenes/.

Deterministic: fixed RNG seeds, stable JSON key order. Run from the repo
root:  python3 tools/gen_scenes.py
"""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
SCENES = ROOT / "scenes"
CORPUS = SCENES / "corpus"

SIZE = 64


def write_pgm(path: Path, grid):
    h = len(grid)
    w = len(grid[0])
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode())
        f.write(bytes(v for row in grid for v in row))


def write_ppm(path: Path, grid, palette):
    h = len(grid)
    w = len(grid[0])
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode())
        out = bytearray()
        for row in grid:
            for v in row:
                out.extend(palette.get(v, (0, 0, 0)))
        f.write(bytes(out))


def empty_grid():
    return [[0] * SIZE for _ in range(SIZE)]


def free(grid, r0, c0, r1, c1):
    if r0 < 0 or c0 < 0 or r1 > SIZE or c1 > SIZE:
        return False
    return all(grid[r][c] == 0 for r in range(r0, r1) for c in range(c0, c1))


def fill(grid, r0, c0, r1, c1, value):
    for r in range(r0, r1):
        for c in range(c0, c1):
            grid[r][c] = value


def place_rect(rng, grid, value, hmin, hmax, wmin, wmax, tries=400):
    for _ in range(tries):
        h = rng.randint(hmin, hmax)
        w = rng.randint(wmin, wmax)
        r = rng.randint(0, SIZE - h)
        c = rng.randint(0, SIZE - w)
        if free(grid, r - 1, c - 1, r + h + 1, c + w + 1):
            fill(grid, r, c, r + h, c + w, value)
            return True
    return False


def place_blocks(rng, grid, value, count=3, side=2, tries=400):
    placed = 0
    for _ in range(tries):
        if placed == count:
            return True
        r = rng.randint(0, SIZE - side)
        c = rng.randint(0, SIZE - side)
        if free(grid, r - 1, c - 1, r + side + 1, c + side + 1):
            fill(grid, r, c, r + side, c + side, value)
            placed += 1
    return placed > 0


SHAPES = {
    "large": lambda rng, grid, v: place_rect(rng, grid, v, 16, 24, 16, 24),
    "medium": lambda rng, grid, v: place_rect(rng, grid, v, 8, 12, 8, 12),
    "hline": lambda rng, grid, v: place_rect(rng, grid, v, 1, 2, 16, 24),
    "vline": lambda rng, grid, v: place_rect(rng, grid, v, 16, 24, 1, 2),
    "small": lambda rng, grid, v: place_rect(rng, grid, v, 2, 4, 2, 4),
    "blocks": lambda rng, grid, v: place_blocks(rng, grid, v),
}

TERRAINS = {
    "plain": [("field", "large"), ("river", "vline"), ("path", "hline"),
              ("houses", "blocks"), ("pond", "medium"), ("windmill", "small")],
    "mountain": [("lake", "large"), ("waterfall", "vline"), ("trail", "hline"),
                 ("cabin", "small"), ("forest", "medium"), ("boulders", "blocks")],
    "desert": [("dunes", "large"), ("canal", "vline"), ("road", "hline"),
               ("tents", "blocks"), ("oasis", "medium"), ("well", "small")],
    "tundra": [("glacier", "large"), ("creek", "vline"), ("ridge", "hline"),
               ("huts", "blocks"), ("iceberg", "medium"), ("stones", "small")],
    "city": [("market", "large"), ("canal", "vline"), ("street", "hline"),
             ("statues", "blocks"), ("garden", "medium"), ("fountain", "small")],
}


def scene_json(name, prompt, n, instances, sketch, seed, provider_seed, extra=None):
    doc = {
        "name": name,
        "prompt": prompt,
        "n": n,
        "instances": instances,
        "provider": {"mode": "synthetic", "seed": provider_seed, "d": 64},
        "k": 2,
        "beta": 1.0,
        "dense": {"lambda0": 2.5, "gamma": 2.0},
        "timesteps": 8,
        "seed": seed,
    }
    if sketch is not None:
        doc["sketch"] = sketch
    if extra:
        doc.update(extra)
    return doc


def make_default():
    grid = empty_grid()
    fill(grid, 28, 4, 45, 29, 1)            # plain: broad rectangle
    fill(grid, 48, 8, 49, 29, 2)            # path: one-pixel-high line
    for r in range(SIZE):                   # river: winding two-wide strip
        c = 33 + (2 if 20 <= r < 44 else 0)
        fill(grid, r, c, r + 1, c + 2, 3)
    fill(grid, 2, 42, 20, 60, 4)            # mountain: top-right block
    for r, c in [(54, 10), (54, 16), (58, 13)]:  # houses: three 2x2 blocks
        fill(grid, r, c, r + 2, c + 2, 5)

    write_pgm(SCENES / "default_sketch.pgm", grid)
    prompt = ("Isometric view of game scene, a plain, walk path, a river, "
              "a high mountain, houses.")
    instances = [
        {"word": "plain", "id": 1},
        {"word": "path", "id": 2},
        {"word": "river", "id": 3},
        {"word": "mountain", "id": 4},
        {"word": "houses", "id": 5},
    ]
    doc = scene_json("default", prompt, 77, instances, "default_sketch.pgm",
                     seed=11, provider_seed=1234)
    (SCENES / "default.json").write_text(json.dumps(doc, indent=2) + "\n")


def make_corpus_scene(index, terrain, rng):
    pool = TERRAINS[terrain]
    count = rng.randint(4, 6)
    chosen = pool[:count]
    grid = empty_grid()
    instances = []
    for i, (word, shape) in enumerate(chosen, start=1):
        if not SHAPES[shape](rng, grid, i):
            raise RuntimeError(f"scene {index}: failed to place {word}")
        instances.append({"word": word, "id": i})

    sub = ", a ".join(w for w, _ in chosen)
    prompt = f"isometric view of game scene, a {terrain}, a {sub}."

    name = f"scene_{index:02d}"
    write_pgm(CORPUS / f"{name}.pgm", grid)
    doc = scene_json(name, prompt, 32, instances, f"{name}.pgm",
                     seed=1000 + index, provider_seed=7 * index + 3)
    (CORPUS / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")


def make_overlap_scene(index, rng):
    # per-instance masks; the lake and the reef deliberately overlap
    name = f"scene_{index:02d}"
    words = [("lake", "large"), ("reefs", "medium"), ("boats", "blocks"), ("pier", "hline")]
    layers = []
    base = empty_grid()
    for i, (word, shape) in enumerate(words, start=1):
        grid = [row[:] for row in base]
        if not SHAPES[shape](rng, grid, 1):
            raise RuntimeError(f"scene {index}: failed to place {word}")
        layers.append(grid)
        if word != "reefs":
            for r in range(SIZE):
                for c in range(SIZE):
                    if grid[r][c]:
                        base[r][c] = 1
    # shift the reef mask onto the lake so the two overlap
    lake = layers[0]
    reef = empty_grid()
    anchor = [(r, c) for r in range(SIZE) for c in range(SIZE) if lake[r][c]]
    r0, c0 = anchor[len(anchor) // 2]
    fill(reef, max(0, r0 - 4), max(0, c0 - 4), min(SIZE, r0 + 4), min(SIZE, c0 + 4), 1)
    layers[1] = reef

    instances = []
    for i, (word, _) in enumerate(words, start=1):
        mask_name = f"{name}_{word}.pgm"
        write_pgm(CORPUS / mask_name, [[255 if v else 0 for v in row] for row in layers[i - 1]])
        instances.append({"word": word, "id": i, "sketch": mask_name})

    prompt = "isometric view of game scene, a bay, a lake, a reefs, a boats, a pier."
    # 'reefs/boats' read oddly with the article; keep word-per-instance strict
    prompt = "isometric view of game scene, a bay with lake, reefs, boats, pier."
    doc = scene_json(name, prompt, 32, instances, None, seed=1000 + index,
                     provider_seed=7 * index + 3)
    (CORPUS / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")


def make_color_scene(index, rng):
    name = f"scene_{index:02d}"
    words = [("harbor", "large"), ("canal", "vline"), ("bridges", "hline"),
             ("ships", "blocks"), ("lighthouse", "small")]
    grid = empty_grid()
    instances = []
    palette = {}
    colors = [(220, 40, 40), (40, 220, 40), (40, 40, 220), (220, 220, 40), (220, 40, 220)]
    for i, (word, shape) in enumerate(words, start=1):
        if not SHAPES[shape](rng, grid, i):
            raise RuntimeError(f"scene {index}: failed to place {word}")
        palette[i] = colors[i - 1]
        instances.append({"word": word, "id": i, "color": list(colors[i - 1])})

    write_ppm(CORPUS / f"{name}.ppm", grid, palette)
    prompt = "isometric view of game scene, a harbor with canal, bridges, ships, lighthouse."
    doc = scene_json(name, prompt, 32, instances, f"{name}.ppm",
                     seed=1000 + index, provider_seed=7 * index + 3)
    (CORPUS / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")


def main():
    SCENES.mkdir(exist_ok=True)
    CORPUS.mkdir(exist_ok=True)
    make_default()

    terrains = list(TERRAINS)
    for index in range(1, 19):
        terrain = terrains[(index - 1) % len(terrains)]
        rng = random.Random(9000 + index)
        make_corpus_scene(index, terrain, rng)
    make_overlap_scene(19, random.Random(9019))
    make_color_scene(20, random.Random(9020))
    print("scenes written to", SCENES)


if __name__ == "__main__":
    main()
