#!/usr/bin/env python3
"""Regenerate the media fixtures and the mock provider table.

The mock provider looks up canned features by the sha256 of the uploaded
bytes, so the table is written from the files actually produced here.
"""

import argparse
import hashlib
import io
import struct
import wave
from pathlib import Path

from PIL import Image, ImageDraw


def image_bytes(colour, shape, fmt):
    img = Image.new("RGB", (64, 48), colour)
    draw = ImageDraw.Draw(img)
    draw.rectangle(shape, fill=(240, 240, 240))
    buf = io.BytesIO()
    img.save(buf, format=fmt, quality=85) if fmt == "JPEG" else img.save(buf, format=fmt)
    return buf.getvalue()


def mp4_bytes(tag):
    # ftyp box followed by a free box; enough for container sniffing.
    ftyp = b"isom" + struct.pack(">I", 512) + b"isomiso2avc1mp41"
    free = tag.encode()
    return (struct.pack(">I", 8 + len(ftyp)) + b"ftyp" + ftyp +
            struct.pack(">I", 8 + len(free)) + b"free" + free)


def wav_bytes(freq, seconds=0.25, rate=8000):
    buf = io.BytesIO()
    with wave.open(buf, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(1)
        w.setframerate(rate)
        frames = bytes(128 + int(60 * ((i * freq // rate) % 2)) for i in range(int(seconds * rate)))
        w.writeframes(frames)
    return buf.getvalue()


# name -> (bytes, kind, tags, caption or transcript)
FIXTURES = {
    "desk.jpg": (lambda: image_bytes((90, 60, 40), (10, 10, 50, 30), "JPEG"), "image",
                 "laptop:0.97,notebook:0.85", "a person working at a desk"),
    "kayak.jpg": (lambda: image_bytes((30, 90, 160), (5, 30, 60, 40), "JPEG"), "image",
                  "kayak:0.93,river:0.88,paddle:0.61", "two people kayaking on a river"),
    "brunch.png": (lambda: image_bytes((200, 150, 90), (20, 12, 44, 36), "PNG"), "image",
                   "food:0.95,plate:0.9,coffee:0.72", "a brunch table with coffee"),
    "blank.png": (lambda: image_bytes((0, 0, 0), (0, 0, 1, 1), "PNG"), "image", "", ""),
    "lab_tour.mp4": (lambda: mp4_bytes("lab tour"), "video",
                     "microscope:0.91,lab:0.86,person:0.7", "a walk through a research lab"),
    "kayak.mp4": (lambda: mp4_bytes("kayak"), "video",
                  "kayak:0.94,lake:0.87,life jacket:0.66", "people kayaking on a lake"),
    "park_walk.mp4": (lambda: mp4_bytes("park walk"), "video",
                      "tree:0.9,park:0.84,dog:0.55", "walking a dog in the park"),
    "voice_parents.wav": (lambda: wav_bytes(440), "audio", "",
                          "I went home to visit my parents and we had dinner together, so happy"),
    "voice_overtime.wav": (lambda: wav_bytes(300), "audio", "",
                           "still at the office doing overtime on the project, really tired"),
    "meetup.wav": (lambda: wav_bytes(520), "audio", "", "met my high school classmates today"),
    "silence.wav": (lambda: wav_bytes(0), "audio", "", ""),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "tests" / "fixtures")
    args = parser.parse_args()

    media = args.out / "media"
    media.mkdir(parents=True, exist_ok=True)
    lines = ["# sha256\tkind\tlabel:confidence,...\tcaption (image/video) or transcript (audio)"]
    for name, (make, kind, tags, last) in FIXTURES.items():
        data = make()
        (media / name).write_bytes(data)
        lines.append(f"# {name}")
        lines.append(f"{hashlib.sha256(data).hexdigest()}\t{kind}\t{tags}\t{last}")
    (args.out / "mock_fixtures.txt").write_text("\n".join(lines) + "\n")
    print(f"wrote {len(FIXTURES)} fixtures to {media}")


if __name__ == "__main__":
    main()
