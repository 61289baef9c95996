# Copyright 2026 The tcpalign Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes data/minimal: one top-down camera, two short trajectories."""

import json
import pathlib

from PIL import Image, ImageDraw

ROOT = pathlib.Path(__file__).resolve().parent / "minimal"
W = H = 128
FX = FY = 100.0
CX = CY = 64.0
CAM_T = (0.5, 0.0, 0.8)
# Camera looking straight down: x_c = -y_w, y_c = -x_w, z_c = -z_w.
CAM_R = [0, -1, 0, -1, 0, 0, 0, 0, -1]
EE_R = [1, 0, 0, 0, -1, 0, 0, 0, -1]

TRAJS = {
    "0": [(0.48, 0.02, 0.30, 0.08), (0.50, 0.00, 0.24, 0.08), (0.52, -0.02, 0.18, 0.08),
          (0.52, -0.02, 0.15, 0.01)],
    "1": [(0.40, 0.10, 0.28, 0.08), (0.43, 0.08, 0.22, 0.07), (0.46, 0.06, 0.17, 0.0)],
}


def project(p):
    d = [p[i] - CAM_T[i] for i in range(3)]
    # R^T d with R row-major
    xc = sum(CAM_R[3 * i + 0] * d[i] for i in range(3))
    yc = sum(CAM_R[3 * i + 1] * d[i] for i in range(3))
    zc = sum(CAM_R[3 * i + 2] * d[i] for i in range(3))
    return FX * xc / zc + CX, FY * yc / zc + CY


def frame_image(ee, target):
    img = Image.new("RGB", (W, H))
    px = img.load()
    for y in range(H):
        for x in range(W):
            px[x, y] = (60 + x // 2, 70 + y // 3, 90 + ((x // 16 + y // 16) % 2) * 40)
    d = ImageDraw.Draw(img)
    tu, tv = project(target)
    d.ellipse([tu - 7, tv - 7, tu + 7, tv + 7], fill=(230, 190, 40))
    u, v = project(ee)
    d.rectangle([u - 9, v - 3, u + 9, v + 3], fill=(235, 235, 232))
    return img


def main():
    (ROOT / "images").mkdir(parents=True, exist_ok=True)
    manifest = {
        "robot": "synthetic-parallel-jaw",
        "gripper_open_ref": 0.08,
        "gripper_close_ref": 0.0,
        "z_table": 0.0,
        "cameras": {
            "front": {"width": W, "height": H, "fx": FX, "fy": FY, "cx": CX, "cy": CY,
                      "rotation": CAM_R, "translation": list(CAM_T)},
        },
        "trajectories": [{"id": k, "camera": "front"} for k in TRAJS],
    }
    (ROOT / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    for tid, frames in TRAJS.items():
        target = (frames[-1][0], frames[-1][1], 0.03)
        (ROOT / "images" / tid).mkdir(exist_ok=True)
        lines = []
        for i, (x, y, z, w) in enumerate(frames):
            nxt = frames[min(i + 1, len(frames) - 1)]
            rel = f"images/{tid}/{i:03d}.png"
            frame_image((x, y, z), target).save(ROOT / rel)
            action = [round(nxt[0] - x, 6), round(nxt[1] - y, 6), round(nxt[2] - z, 6),
                      1, 0, 0, 0, 1, 0, 1.0 if nxt[3] > 0.04 else 0.0]
            lines.append(json.dumps({"index": i, "image": rel, "rotation": EE_R,
                                     "translation": [x, y, z], "gripper_width": w,
                                     "action": action}))
        (ROOT / f"traj_{tid}.jsonl").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
