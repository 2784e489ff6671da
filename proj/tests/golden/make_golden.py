#!/usr/bin/env python3
"""Writes the golden bank, index and manifest files for the tiny corpus.

This is a from-scratch writer for the on-disk formats; the C++ library is
checked against its output byte for byte.
"""
import pathlib
import struct

HERE = pathlib.Path(__file__).resolve().parent
MASK = "1101"
CODES = {"A": 0, "C": 1, "G": 2, "T": 3}
AMBIGUOUS = set("NRYKMSWBDHV")

CORPUS = [
    ("alpha", "first test sequence", "ACGTACGTTGCAacgtNNACGUAGGCTTAC"),
    ("beta", "", "GGGCCCAAATTT"),
    ("gamma", "ambiguous R and Y", "TTTTRYACGTACGTAGCTAGCTAGGATCCA"),
    ("delta", "short", "ACG"),
]


def normalize(seq):
    out = []
    for c in seq.upper():
        c = "T" if c == "U" else c
        out.append(c if c in CODES else "N")
        assert c in CODES or c in AMBIGUOUS
    return "".join(out)


def short_string(s):
    return struct.pack("<H", len(s)) + s.encode()


def payload(bases):
    words = (len(bases) + 15) // 16
    trailing = (len(bases) - 1) % 16 + 1
    out = struct.pack("<IB", words, trailing)
    for w in range(words):
        value = 0
        for c in bases[w * 16:(w + 1) * 16]:
            value = value * 4 + CODES.get(c, 0)
        out += struct.pack("<I", value)
    bitmap = bytearray((len(bases) + 7) // 8)
    for i, c in enumerate(bases):
        if c == "N":
            bitmap[i // 8] |= 1 << (i % 8)
    return out + bytes(bitmap)


def bank_bytes(name, records):
    seqs = [normalize(s) for _, _, s in records]
    header = b"GNDB" + struct.pack("<H", 1) + short_string(MASK)
    header += struct.pack("<IQ", len(records), sum(len(s) for s in seqs))
    heap = name.encode()
    strings = []
    for n, d, _ in records:
        strings.append((len(heap), len(heap) + len(n)))
        heap += n.encode() + d.encode()
    payloads = [payload(s) for s in seqs]
    offset = len(header) + 36 * len(records) + 12 + len(heap)
    table = b""
    for (n, d, _), s, (no, do), p in zip(records, seqs, strings, payloads):
        table += struct.pack("<IIIQQQ", len(s), len(n), len(d), no, do, offset)
        offset += len(p)
    return header + table + struct.pack("<QI", len(heap), len(name)) + heap + b"".join(payloads)


def index_bytes(name, records):
    m, kept = len(MASK), [i for i, c in enumerate(MASK) if c == "1"]
    buckets = {}
    for seq_id, (_, _, raw) in enumerate(records):
        s = normalize(raw)
        for pos in range(0, len(s) - m + 1, m):
            window = s[pos:pos + m]
            if "N" in window:
                continue
            value = 0
            for k in kept:
                value = value * 4 + CODES[window[k]]
            buckets.setdefault(value, []).append((seq_id, pos))
    out = b"GNIX" + struct.pack("<HB", 1, len(kept)) + short_string(MASK) + short_string(name)
    entries, first = b"", 0
    for value in range(4 ** len(kept)):
        hits = sorted(buckets.get(value, []))
        out += struct.pack("<QI", first if hits else 0, len(hits))
        for seq_id, pos in hits:
            entries += struct.pack("<II", seq_id, pos)
        first += len(hits)
    return out + entries


def main():
    with open(HERE / "tiny.fasta", "w") as f:
        for n, d, s in CORPUS:
            f.write(">" + n + (" " + d if d else "") + "\n" + s + "\n")
    (HERE / "tiny.gndb").write_bytes(bank_bytes("tiny", CORPUS))
    (HERE / "tiny.gnix").write_bytes(index_bytes("tiny", CORPUS))

    # Two fragments, each sequence going to the fragment with fewer bases.
    parts, totals = [[], []], [0, 0]
    for gid, rec in enumerate(CORPUS):
        target = 0 if totals[0] <= totals[1] else 1
        parts[target].append((gid, rec))
        totals[target] += len(rec[2])
    frag = HERE / "fragments"
    frag.mkdir(exist_ok=True)
    manifest = b"GNFM" + struct.pack("<HII", 1, 2, len(CORPUS))
    for i, part in enumerate(parts):
        records = [rec for _, rec in part]
        (frag / f"tiny.{i}.gndb").write_bytes(bank_bytes(f"tiny#{i}", records))
        (frag / f"tiny.{i}.gnix").write_bytes(index_bytes(f"tiny#{i}", records))
        manifest += struct.pack("<I", len(part)) + b"".join(struct.pack("<I", gid) for gid, _ in part)
    (frag / "tiny.gnfm").write_bytes(manifest)


if __name__ == "__main__":
    main()
