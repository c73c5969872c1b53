#!/usr/bin/env python3
"""Fetch the WordNet 3.0 database and SentiWordNet 3.0 into vendor/.

Both resources are redistributed inside npm packages, which is the only
package channel that carries them:

  wndb-with-exceptions  -> WNdb-3.0.tar.gz (dict files) + *.exc lists
  node-sentiwordnet     -> SentiWordNet_3.0.0_20130122.txt

The WNdb repack omits the tiny ``lexnames`` manifest that a full WordNet
install ships, so we write the canonical 45-entry table ourselves.

Usage:  python scripts/fetch_resources.py [--dest vendor]

Requires ``npm`` on PATH. The personality corpora (essays etc.) are NOT
fetched here; they have restricted redistribution and must be supplied by
the user (see README).
"""

import argparse
import hashlib
import shutil
import subprocess
import sys
import tarfile
import tempfile
from pathlib import Path

# lexnames(5WN): lexicographer file numbers, names and syntactic category.
LEXNAMES = """\
00	adj.all	3
01	adj.pert	3
02	adv.all	4
03	noun.Tops	1
04	noun.act	1
05	noun.animal	1
06	noun.artifact	1
07	noun.attribute	1
08	noun.body	1
09	noun.cognition	1
10	noun.communication	1
11	noun.event	1
12	noun.feeling	1
13	noun.food	1
14	noun.group	1
15	noun.location	1
16	noun.motive	1
17	noun.object	1
18	noun.person	1
19	noun.phenomenon	1
20	noun.plant	1
21	noun.possession	1
22	noun.process	1
23	noun.quantity	1
24	noun.relation	1
25	noun.shape	1
26	noun.state	1
27	noun.substance	1
28	noun.time	1
29	verb.body	2
30	verb.change	2
31	verb.cognition	2
32	verb.communication	2
33	verb.competition	2
34	verb.consumption	2
35	verb.contact	2
36	verb.creation	2
37	verb.emotion	2
38	verb.motion	2
39	verb.perception	2
40	verb.possession	2
41	verb.social	2
42	verb.stative	2
43	verb.weather	2
44	adj.ppl	3
"""


def npm_pack(package, workdir):
    out = subprocess.run(
        ["npm", "pack", package], cwd=workdir, capture_output=True, text=True
    )
    if out.returncode != 0:
        sys.exit(f"npm pack {package} failed:\n{out.stderr}")
    tgz = out.stdout.strip().splitlines()[-1]
    return Path(workdir) / tgz


def extract(tgz, workdir):
    dest = Path(workdir) / (tgz.stem + ".d")
    with tarfile.open(tgz) as tf:
        tf.extractall(dest)
    return dest / "package"


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def fetch_wordnet(dest, workdir):
    pkg = extract(npm_pack("wndb-with-exceptions@3.0.2", workdir), workdir)
    inner = pkg / "WNdb-3.0.tar.gz"
    with tarfile.open(inner) as tf:
        tf.extractall(workdir / "wndb")
    srcdict = workdir / "wndb" / "dict"
    dictdir = dest / "wordnet" / "dict"
    dictdir.mkdir(parents=True, exist_ok=True)
    for f in sorted(srcdict.iterdir()):
        shutil.copy2(f, dictdir / f.name)
    for exc in sorted((pkg / "data").glob("*.exc")):
        shutil.copy2(exc, dictdir / exc.name)
    lexnames = dictdir / "lexnames"
    lexnames.write_text(LEXNAMES)
    print(f"WordNet 3.0 dict -> {dictdir}")
    for f in sorted(dictdir.iterdir()):
        print(f"  {f.name:14s} {f.stat().st_size:>9d}  sha256:{sha256(f)[:16]}")
    return dictdir


def fetch_sentiwordnet(dest, workdir):
    pkg = extract(npm_pack("node-sentiwordnet@0.0.4", workdir), workdir)
    src = pkg / "data" / "SentiWordNet_3.0.0_20130122.txt"
    out = dest / "sentiwordnet" / "SentiWordNet_3.0.0_20130122.txt"
    out.parent.mkdir(parents=True, exist_ok=True)
    shutil.copy2(src, out)
    print(f"SentiWordNet 3.0 -> {out}  sha256:{sha256(out)[:16]}")
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dest", default="vendor", type=Path)
    args = ap.parse_args()
    args.dest.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        fetch_wordnet(args.dest, tmp)
        fetch_sentiwordnet(args.dest, tmp)
    print("done")


if __name__ == "__main__":
    main()
