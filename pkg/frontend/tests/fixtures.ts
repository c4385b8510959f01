/** A small hand-built graph document: 3 scenes, branching points at 45 s
 * and 80 s, constant-direction branches, matching the pipeline schema. */

import { BranchDoc, BranchGraphDoc, CueDoc, SceneDoc } from "../src/graph";

function branch(
  index: number,
  first: number,
  last: number,
  yawDeg: number,
  title: string,
  caption: string,
  social: number,
): BranchDoc {
  const path: [number, number, number][] = [];
  for (let f = first; f <= last; f++) path.push([f, yawDeg, 0]);
  return {
    index,
    title,
    seed_index: index,
    degenerate: false,
    social_score: social,
    viewport: { h_fov_deg: 120, v_fov_deg: 90 },
    path,
    captions: [[first, caption]],
    narration: {
      start_s: first,
      end_s: last + 1,
      word_budget: 3 * (last + 1 - first),
      text: `Narration for ${title}.`,
      placeable: true,
      overrun: false,
      speech_rate: [1.1, 1.2],
    },
  };
}

function scene(
  index: number,
  startPoint: number | null,
  endPoint: number | null,
  first: number,
  last: number,
  yaws: number[],
): SceneDoc {
  return {
    index,
    start_point: startPoint,
    end_point: endPoint,
    frame_range: [first, last],
    title: `Scene title ${index + 1}`,
    default_branch: 0,
    branches: yaws.map((yaw, b) =>
      branch(
        b,
        first,
        last,
        yaw,
        `Branch title ${index + 1}.${b + 1}`,
        `caption ${index + 1}.${b + 1}`,
        b === 0 ? 1 : 0,
      ),
    ),
    diversity: { d_spa: 1, d_sem: 1, d_soc: 0.5, overall: (1 + 1 + 0.5) / 3 },
    selection_trace: [],
  };
}

export function testGraph(): BranchGraphDoc {
  const scenes = [
    scene(0, null, 0, 0, 44, [0, 50]),
    scene(1, 0, 1, 45, 79, [0, 120, -120]),
    scene(2, 1, null, 80, 119, [-90, 90]),
  ];
  const cues: CueDoc[] = [];
  scenes.forEach((s) => {
    s.branches.forEach((b) => {
      cues.push({
        scene_index: s.index + 1,
        scene_count: scenes.length,
        branch_index: b.index + 1,
        branch_count: s.branches.length,
        scene_title: s.title,
        branch_title: b.title,
        recap: s.index > 0 ? scenes[s.index - 1].title : "",
      });
    });
  });
  return {
    version: "branchgraph/1",
    video: { duration_s: 120, fps: 1 },
    config: {},
    branch_points: [
      { id: 0, time_s: 45, source: "shifted" },
      { id: 1, time_s: 80, source: "scene_cut" },
    ],
    scenes,
    cues,
  };
}
