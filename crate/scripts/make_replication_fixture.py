#!/usr/bin/env python3
"""Regenerate the synthetic replication fixture under crates/core/fixtures/.

The fixture mimics three recorded sweeps of the trending-videos endpoint:
50 items per sweep, overlapping so that 106 unique IDs are seen in total.
100 of those videos allow commenting and carry the bundled video-ID list;
the remaining 6 have comments disabled (no commentCount). Category
frequencies over the 100 comment-enabled videos follow the bundled
category table. Statistics are synthetic; only the sample structure is
meant to match.

Usage: python3 scripts/make_replication_fixture.py
"""

import json
import math
import os
import random
import re

ROOT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "fixtures")
OUT = os.path.join(ROOT, "replication")

CATEGORY_IDS = {
    "Film": "1",
    "Music": "10",
    "Animals": "15",
    "Sports": "17",
    "Travel": "19",
    "People": "22",
    "Comedy": "23",
    "Entertainment": "24",
    "News": "25",
    "Howto": "26",
    "Education": "27",
    "Tech": "28",
    "Nonprofit": "29",
}

CATEGORY_COUNTS = [
    ("Entertainment", 24),
    ("Tech", 15),
    ("Sports", 11),
    ("Comedy", 9),
    ("Education", 9),
    ("News", 8),
    ("Film", 7),
    ("Animals", 4),
    ("Music", 4),
    ("People", 4),
    ("Nonprofit", 3),
    ("Howto", 1),
    ("Travel", 1),
]

DISABLED_IDS = ["cmOff0A1bQx", "cmOff1B2cRy", "cmOff2C3dSz", "cmOff3D4eTa", "cmOff4E5fUb", "cmOff5F6gVc"]

SWEEP_TIMES = ["2013-12-03T10:00:00Z", "2013-12-06T10:00:00Z", "2013-12-10T10:00:00Z"]


def load_ids():
    with open(os.path.join(ROOT, "original_sample_ids.txt")) as f:
        text = f.read()
    return [tok for tok in re.split(r"[;\s]+", text) if tok]


def main():
    rng = random.Random(2013)
    ids = load_ids()
    assert len(ids) == 100, len(ids)

    categories = [name for name, count in CATEGORY_COUNTS for _ in range(count)]
    rng.shuffle(categories)

    videos = []
    for vid, cat in zip(ids, categories):
        views = int(math.exp(rng.uniform(math.log(7105), math.log(36_285_216))))
        cpki = math.exp(rng.gauss(math.log(0.8), 1.0))
        vpki = math.exp(rng.gauss(math.log(6.0), 0.8))
        disp = min(0.88, max(0.0075, math.exp(rng.gauss(math.log(0.06), 0.9))))
        votes = max(2, round(views * vpki / 1000))
        dislikes = max(1, round(votes * disp))
        likes = max(1, votes - dislikes)
        comments = max(1, round(views * cpki / 1000))
        videos.append(
            {"id": vid, "cat": cat, "views": views, "likes": likes, "dislikes": dislikes, "comments": comments}
        )
    for vid in DISABLED_IDS:
        views = int(math.exp(rng.uniform(math.log(50_000), math.log(20_000_000))))
        votes = max(2, round(views * 5 / 1000))
        videos.append(
            {"id": vid, "cat": "Entertainment", "views": views, "likes": votes - votes // 10,
             "dislikes": votes // 10, "comments": None}
        )

    order = list(range(len(videos)))
    rng.shuffle(order)
    # 50 + 30 new + 26 new = 106 unique; 20 + 24 repeats
    sweeps = [
        order[0:50],
        order[30:80],
        order[80:106] + order[0:24],
    ]

    os.makedirs(OUT, exist_ok=True)
    last_sweep = {}
    for k, members in enumerate(sweeps):
        for i in members:
            last_sweep[i] = k

    for k, members in enumerate(sweeps):
        items = []
        for i in members:
            v = videos[i]
            # earlier sightings of a video carry smaller counters than its final sweep
            shrink = 1.0 if last_sweep[i] == k else 0.8
            stats = {
                "viewCount": str(int(v["views"] * shrink)),
                "likeCount": str(int(v["likes"] * shrink)),
                "dislikeCount": str(int(v["dislikes"] * shrink)),
                "favoriteCount": "0",
            }
            if v["comments"] is not None:
                stats["commentCount"] = str(int(v["comments"] * shrink))
            items.append(
                {
                    "kind": "youtube#video",
                    "id": v["id"],
                    "snippet": {"categoryId": CATEGORY_IDS[v["cat"]]},
                    "statistics": stats,
                }
            )
        page1 = {
            "kind": "youtube#videoListResponse",
            "fetchedAt": SWEEP_TIMES[k],
            "nextPageToken": "CDIQAA",
            "pageInfo": {"totalResults": 200, "resultsPerPage": 50},
            "items": items,
        }
        page2 = {
            "kind": "youtube#videoListResponse",
            "fetchedAt": SWEEP_TIMES[k],
            "prevPageToken": "CDIQAQ",
            "pageInfo": {"totalResults": 200, "resultsPerPage": 50},
            "items": [],
        }
        for j, page in enumerate([page1, page2], start=1):
            path = os.path.join(OUT, f"sweep{k + 1}_page{j}.json")
            with open(path, "w") as f:
                json.dump(page, f, indent=2)
                f.write("\n")


if __name__ == "__main__":
    main()
