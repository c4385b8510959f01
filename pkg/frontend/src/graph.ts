/**
 * Branch graph document types and the schema guard.
 *
 * The player consumes documents with version tag "branchgraph/1" and
 * refuses anything else with a detailed error, so a stale player never
 * silently misreads a newer pipeline's output.
 */

export const SUPPORTED_VERSION = "branchgraph/1";

export interface BranchPointDoc {
  id: number;
  time_s: number;
  source: "scene_cut" | "merged" | "shifted";
}

export interface NarrationDoc {
  start_s: number;
  end_s: number;
  word_budget: number;
  text: string | null;
  placeable: boolean;
  overrun: boolean;
  speech_rate: [number, number];
}

export interface BranchDoc {
  index: number;
  title: string;
  seed_index: number;
  degenerate: boolean;
  social_score: number;
  viewport: { h_fov_deg: number; v_fov_deg: number };
  /** [frame, yawDeg, pitchDeg] per frame of the scene */
  path: [number, number, number][];
  captions: [number, string][];
  narration: NarrationDoc;
}

export interface SceneDoc {
  index: number;
  start_point: number | null;
  end_point: number | null;
  frame_range: [number, number];
  title: string;
  default_branch: number;
  branches: BranchDoc[];
  diversity: { d_spa: number; d_sem: number; d_soc: number; overall: number };
  selection_trace: { step: number; candidate: number; diversity: number; stopped: boolean }[];
}

export interface CueDoc {
  scene_index: number;
  scene_count: number;
  branch_index: number;
  branch_count: number;
  scene_title: string;
  branch_title: string;
  recap: string;
}

export interface BranchGraphDoc {
  version: string;
  video: { duration_s: number; fps: number };
  config: Record<string, unknown>;
  branch_points: BranchPointDoc[];
  scenes: SceneDoc[];
  cues: CueDoc[];
}

export class GraphSchemaError extends Error {}

/** Parse and structurally check a document; throws GraphSchemaError. */
export function parseGraph(data: string | unknown): BranchGraphDoc {
  let doc: unknown = data;
  if (typeof data === "string") {
    try {
      doc = JSON.parse(data);
    } catch (err) {
      throw new GraphSchemaError(`document is not valid JSON: ${String(err)}`);
    }
  }
  if (typeof doc !== "object" || doc === null) {
    throw new GraphSchemaError("document must be a JSON object");
  }
  const graph = doc as BranchGraphDoc;
  if (graph.version !== SUPPORTED_VERSION) {
    throw new GraphSchemaError(
      `unsupported graph version ${JSON.stringify(graph.version)}; ` +
        `this player understands ${SUPPORTED_VERSION}`,
    );
  }
  if (!graph.video || !(graph.video.duration_s > 0) || !(graph.video.fps > 0)) {
    throw new GraphSchemaError("video metadata missing or invalid");
  }
  if (!Array.isArray(graph.scenes) || graph.scenes.length === 0) {
    throw new GraphSchemaError("graph has no scenes");
  }
  if (!Array.isArray(graph.branch_points)) {
    throw new GraphSchemaError("graph has no branch_points list");
  }
  if (graph.scenes.length !== graph.branch_points.length + 1) {
    throw new GraphSchemaError(
      `${graph.scenes.length} scenes do not fit ${graph.branch_points.length} branch points`,
    );
  }
  graph.scenes.forEach((scene, i) => {
    if (!Array.isArray(scene.branches) || scene.branches.length === 0) {
      throw new GraphSchemaError(`scene ${i} has no branches`);
    }
    if (
      !Number.isInteger(scene.default_branch) ||
      scene.default_branch < 0 ||
      scene.default_branch >= scene.branches.length
    ) {
      throw new GraphSchemaError(`scene ${i} default_branch out of range`);
    }
    scene.branches.forEach((branch, b) => {
      const span = scene.frame_range[1] - scene.frame_range[0] + 1;
      if (!Array.isArray(branch.path) || branch.path.length !== span) {
        throw new GraphSchemaError(`scene ${i} branch ${b} path does not cover the scene`);
      }
    });
  });
  if (!Array.isArray(graph.cues)) {
    throw new GraphSchemaError("graph has no cue table");
  }
  return graph;
}

export function sceneOfFrame(graph: BranchGraphDoc, frame: number): number {
  for (const scene of graph.scenes) {
    if (frame >= scene.frame_range[0] && frame <= scene.frame_range[1]) {
      return scene.index;
    }
  }
  return graph.scenes.length - 1;
}

export function cueFor(
  graph: BranchGraphDoc,
  sceneIndex: number,
  branchIndex: number,
): CueDoc | undefined {
  return graph.cues.find(
    (c) => c.scene_index === sceneIndex + 1 && c.branch_index === branchIndex + 1,
  );
}

export function announceCue(cue: CueDoc): string {
  return (
    `[Scene ${cue.scene_index} of ${cue.scene_count}] ${cue.scene_title}; ` +
    `[Branch ${cue.branch_index} of ${cue.branch_count}] ${cue.branch_title}`
  );
}

export function recapLine(cue: CueDoc): string {
  return cue.recap ? `[Previously] ${cue.recap}` : "";
}
