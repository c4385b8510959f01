/**
 * The interactive playthrough state machine.
 *
 * Pure logic with time injected through tick(), so tests can drive it
 * deterministically. A host layer owns rendering, audio, and input and
 * reacts to the effects this machine emits.
 *
 * Branch choice contract: at each branching point the player pings for
 * half a second and arms a five-second countdown anchored at the point
 * time; playback keeps running. Pressing choose pauses and presents the
 * top two branches (left/right); with no choose-press the default branch
 * continues seamlessly.
 */

import {
  announceCue,
  BranchDoc,
  BranchGraphDoc,
  cueFor,
  recapLine,
  sceneOfFrame,
} from "./graph";
import { angularDistanceDeg, dirFromAngles, inViewport, steer, Vec3 } from "./geometry";

export const CHOICE_WINDOW_S = 5.0;
export const PING_DURATION_S = 0.5;
export const SEEK_STEP_S = 5.0;

export type Mode = "playing" | "choice_pending" | "paused_explore" | "navigating";

export type Cause = "user_choice" | "default_timeout" | "navigation_jump";

export interface TraceEvent {
  time_s: number;
  scene: number;
  branch: number;
  cause: Cause;
  requested: number | null;
  cue: string;
  recap: string;
  error: string | null;
}

export interface OptionInfo {
  branch: number;
  title: string;
}

export type Effect =
  | { kind: "ping"; durationS: number }
  | { kind: "countdown"; deadlineS: number }
  | { kind: "options"; left: OptionInfo; right: OptionInfo | null }
  | { kind: "cue"; announcement: string; recap: string }
  | { kind: "caption"; text: string | null }
  | { kind: "narration"; text: string }
  | { kind: "ended" };

export type NavigateDirection = "branch_prev" | "branch_next" | "point_prev" | "point_next";

interface PendingChoice {
  pointIndex: number;
  deadlineS: number;
  presented: boolean;
}

interface NavigationState {
  scene: number;
  branch: number;
  returnMode: Mode;
  returnPending: PendingChoice | null;
}

export class Player {
  readonly graph: BranchGraphDoc;
  mode: Mode = "paused_explore"; // awaiting the start gesture
  playheadS = 0;
  /** Chosen branch per scene; seeded with defaults so rendering is always defined. */
  readonly sceneChoices: number[];
  private committedPoints = 0;
  private pending: PendingChoice | null = null;
  private navigation: NavigationState | null = null;
  private lookOverride: Vec3 | null = null;
  private lastExploredBranch: number | null | undefined = undefined;
  private readonly pointRequested: (number | null)[] = [];
  private readonly events: TraceEvent[] = [];
  private endedFired = false;
  private firedNarrations = new Set<string>();
  private onEffect: (effect: Effect) => void;

  constructor(graph: BranchGraphDoc, onEffect?: (effect: Effect) => void) {
    this.graph = graph;
    this.onEffect = onEffect ?? (() => undefined);
    this.sceneChoices = graph.scenes.map((s) => s.default_branch);
    this.pushEvent(0, 0, this.sceneChoices[0], "default_timeout", null);
  }

  // ---- queries -----------------------------------------------------------

  get durationS(): number {
    return this.graph.video.duration_s;
  }

  currentFrame(): number {
    const last = this.graph.scenes[this.graph.scenes.length - 1].frame_range[1];
    return Math.min(last, Math.max(0, Math.floor(this.playheadS * this.graph.video.fps)));
  }

  currentScene(): number {
    return sceneOfFrame(this.graph, this.currentFrame());
  }

  currentBranch(): number {
    return this.sceneChoices[this.currentScene()];
  }

  private branchDoc(scene: number, branch: number): BranchDoc {
    return this.graph.scenes[scene].branches[branch];
  }

  private pathDirection(scene: number, branch: number, frame: number): Vec3 {
    const doc = this.branchDoc(scene, branch);
    const offset = frame - this.graph.scenes[scene].frame_range[0];
    const entry = doc.path[Math.min(doc.path.length - 1, Math.max(0, offset))];
    return dirFromAngles(entry[1], entry[2]);
  }

  /** Rendered viewport center: the branch path unless the user looked away. */
  viewportCenter(): Vec3 {
    if (this.lookOverride && this.mode === "paused_explore") {
      return this.lookOverride;
    }
    const scene = this.currentScene();
    return this.pathDirection(scene, this.sceneChoices[scene], this.currentFrame());
  }

  locationLabel(): string {
    const scene = this.currentScene();
    const cue = cueFor(this.graph, scene, this.sceneChoices[scene]);
    return cue ? announceCue(cue) : "";
  }

  choicePending(): boolean {
    return this.pending !== null;
  }

  countdownRemaining(): number | null {
    if (!this.pending || this.pending.presented) return null;
    return Math.max(0, this.pending.deadlineS - this.playheadS);
  }

  trace(): TraceEvent[] {
    return this.events.slice();
  }

  /** Script entries for the committed points, in point order: feed these to
   * `storysphere simulate --policy script` to reproduce the playthrough. */
  exportScript(): (number | null)[] {
    return Array.from({ length: this.committedPoints }, (_, i) => this.pointRequested[i] ?? null);
  }

  // ---- time --------------------------------------------------------------

  tick(dtS: number): void {
    const advancing =
      this.mode === "playing" || (this.mode === "choice_pending" && !this.pending?.presented);
    if (!advancing) return;
    this.playheadS = Math.min(this.durationS, this.playheadS + dtS);

    if (this.pending && !this.pending.presented && this.playheadS >= this.pending.deadlineS) {
      const scene = this.pending.pointIndex + 1;
      this.commit(this.graph.scenes[scene].default_branch, "default_timeout", null);
    } else if (!this.pending && this.nextPointReached()) {
      this.armPending();
    }
    this.fireNarration();
    if (this.playheadS >= this.durationS && !this.endedFired) {
      this.endedFired = true;
      this.onEffect({ kind: "ended" });
    }
  }

  private nextPointReached(): boolean {
    return (
      this.committedPoints < this.graph.branch_points.length &&
      this.playheadS >= this.graph.branch_points[this.committedPoints].time_s
    );
  }

  private armPending(): void {
    const point = this.graph.branch_points[this.committedPoints];
    this.pending = {
      pointIndex: this.committedPoints,
      deadlineS: point.time_s + CHOICE_WINDOW_S,
      presented: false,
    };
    this.mode = "choice_pending";
    this.onEffect({ kind: "ping", durationS: PING_DURATION_S });
    this.onEffect({ kind: "countdown", deadlineS: this.pending.deadlineS });
  }

  private commit(branch: number, cause: Cause, requested: number | null): void {
    if (!this.pending) return;
    const pointIndex = this.pending.pointIndex;
    const scene = pointIndex + 1;
    this.sceneChoices[scene] = branch;
    this.pointRequested[pointIndex] = requested;
    this.committedPoints = pointIndex + 1;
    this.pending = null;
    this.mode = "playing";
    this.pushEvent(this.graph.branch_points[pointIndex].time_s, scene, branch, cause, requested);
  }

  private pushEvent(
    timeS: number,
    scene: number,
    branch: number,
    cause: Cause,
    requested: number | null,
    error: string | null = null,
  ): void {
    const cue = cueFor(this.graph, scene, branch);
    this.events.push({
      time_s: timeS,
      scene,
      branch,
      cause,
      requested,
      cue: cue ? announceCue(cue) : "",
      recap: cue ? recapLine(cue) : "",
      error,
    });
    if (cue) {
      this.onEffect({ kind: "cue", announcement: announceCue(cue), recap: recapLine(cue) });
    }
  }

  private fireNarration(): void {
    if (this.mode !== "playing" && this.mode !== "choice_pending") return;
    const scene = this.currentScene();
    const branch = this.sceneChoices[scene];
    const slot = this.branchDoc(scene, branch).narration;
    const key = `${scene}:${branch}`;
    if (
      slot.text &&
      slot.placeable &&
      !this.firedNarrations.has(key) &&
      this.playheadS >= slot.start_s &&
      this.playheadS < slot.end_s
    ) {
      this.firedNarrations.add(key);
      this.onEffect({ kind: "narration", text: slot.text });
    }
  }

  // ---- branch choice -----------------------------------------------------

  /** The "shake" equivalent: pause and present the top two options. */
  pressChoose(): void {
    if (this.mode !== "choice_pending" || !this.pending || this.pending.presented) return;
    this.pending.presented = true; // playback pauses; countdown no longer applies
    const scene = this.graph.scenes[this.pending.pointIndex + 1];
    const left: OptionInfo = { branch: 0, title: scene.branches[0].title };
    const right: OptionInfo | null =
      scene.branches.length > 1 ? { branch: 1, title: scene.branches[1].title } : null;
    this.onEffect({ kind: "options", left, right });
  }

  selectOption(side: "left" | "right"): void {
    if (this.mode !== "choice_pending" || !this.pending?.presented) return;
    const scene = this.graph.scenes[this.pending.pointIndex + 1];
    const branch = side === "left" ? 0 : 1;
    if (branch >= scene.branches.length) return;
    this.commit(branch, "user_choice", branch);
  }

  // ---- storyline navigation ----------------------------------------------

  navigate(direction: NavigateDirection): void {
    if (this.mode === "choice_pending" && this.pending?.presented) return;
    if (this.mode !== "navigating") {
      this.navigation = {
        scene: this.currentScene(),
        branch: this.sceneChoices[this.currentScene()],
        returnMode: this.mode,
        returnPending: this.pending,
      };
      this.pending = null;
      this.mode = "navigating";
    }
    const nav = this.navigation!;
    const nScenes = this.graph.scenes.length;
    if (direction === "branch_prev" || direction === "branch_next") {
      const n = this.graph.scenes[nav.scene].branches.length;
      const step = direction === "branch_next" ? 1 : -1;
      nav.branch = (nav.branch + step + n) % n; // past list ends wraps (cycle)
    } else {
      const step = direction === "point_next" ? 1 : -1;
      nav.scene = (nav.scene + step + nScenes) % nScenes;
      nav.branch = Math.min(
        this.sceneChoices[nav.scene],
        this.graph.scenes[nav.scene].branches.length - 1,
      );
    }
    const cue = cueFor(this.graph, nav.scene, nav.branch);
    if (cue) {
      this.onEffect({ kind: "cue", announcement: announceCue(cue), recap: "" });
    }
  }

  navigationTarget(): { scene: number; branch: number } | null {
    return this.navigation ? { scene: this.navigation.scene, branch: this.navigation.branch } : null;
  }

  /** Double-tap equivalent: jump to the target branch start with a recap. */
  confirmNavigation(): void {
    if (this.mode !== "navigating" || !this.navigation) return;
    const { scene, branch } = this.navigation;
    this.sceneChoices[scene] = branch;
    this.committedPoints = scene; // earlier points stay resolved as chosen
    if (scene > 0) this.pointRequested[scene - 1] = branch !== this.graph.scenes[scene].default_branch ? branch : null;
    this.pending = null;
    this.navigation = null;
    this.playheadS = this.graph.scenes[scene].frame_range[0] / this.graph.video.fps;
    this.endedFired = false;
    this.firedNarrations.clear();
    this.lookOverride = null;
    this.mode = "playing";
    this.pushEvent(this.playheadS, scene, branch, "navigation_jump", null);
  }

  cancelNavigation(): void {
    if (this.mode !== "navigating" || !this.navigation) return;
    this.mode = this.navigation.returnMode;
    this.pending = this.navigation.returnPending;
    this.navigation = null;
  }

  // ---- spatial exploration -------------------------------------------------

  /** Steer the paused look direction; reports the caption of the viewport
   * entered, preferring the branch with the smallest angular deviation. */
  lookAt(direction: Vec3): void {
    if (this.mode !== "paused_explore") return;
    this.lookOverride = direction;
    const frame = this.currentFrame();
    const scene = this.graph.scenes[this.currentScene()];
    let best: { branch: number; deviation: number } | null = null;
    scene.branches.forEach((branch, index) => {
      const center = this.pathDirection(scene.index, index, frame);
      if (!inViewport(direction, center, branch.viewport.h_fov_deg, branch.viewport.v_fov_deg)) {
        return;
      }
      const deviation = angularDistanceDeg(direction, center);
      if (!best || deviation < best.deviation) {
        best = { branch: index, deviation };
      }
    });
    const hit: number | null = best ? (best as { branch: number }).branch : null;
    if (hit !== this.lastExploredBranch) {
      this.lastExploredBranch = hit;
      this.onEffect({
        kind: "caption",
        text: hit === null ? null : this.captionAt(scene.index, hit, frame),
      });
    }
  }

  steerLook(dYawDeg: number, dPitchDeg: number): void {
    if (this.mode !== "paused_explore") return;
    this.lookAt(steer(this.lookOverride ?? this.viewportCenter(), dYawDeg, dPitchDeg));
  }

  private captionAt(scene: number, branch: number, frame: number): string | null {
    const captions = this.branchDoc(scene, branch).captions;
    if (!captions.length) return null;
    let best = captions[0];
    for (const entry of captions) {
      if (Math.abs(entry[0] - frame) < Math.abs(best[0] - frame)) best = entry;
    }
    return best[1];
  }

  // ---- transport -----------------------------------------------------------

  togglePause(): void {
    switch (this.mode) {
      case "playing":
        this.mode = "paused_explore";
        this.lastExploredBranch = undefined;
        break;
      case "paused_explore":
        this.lookOverride = null;
        this.mode = "playing";
        break;
      case "choice_pending":
        // pausing mid-window skips the choice: the default continues
        if (this.pending && !this.pending.presented) {
          const scene = this.pending.pointIndex + 1;
          this.commit(this.graph.scenes[scene].default_branch, "default_timeout", null);
          this.mode = "paused_explore";
        }
        break;
      case "navigating":
        break;
    }
  }

  seek(deltaS: number): void {
    if (this.mode === "navigating" || this.pending?.presented) return;
    const target = Math.min(this.durationS, Math.max(0, this.playheadS + deltaS));
    if (deltaS > 0) {
      // skipping a branching point takes the default branch, as a timeout would
      if (this.pending && target >= this.pending.deadlineS) {
        const scene = this.pending.pointIndex + 1;
        this.commit(this.graph.scenes[scene].default_branch, "default_timeout", null);
        if (this.mode === "playing" && this.lookOverride) this.lookOverride = null;
      }
      while (
        !this.pending &&
        this.committedPoints < this.graph.branch_points.length &&
        this.graph.branch_points[this.committedPoints].time_s <= target
      ) {
        const pointIndex = this.committedPoints;
        const scene = pointIndex + 1;
        const branch = this.graph.scenes[scene].default_branch;
        this.sceneChoices[scene] = branch;
        this.pointRequested[pointIndex] = null;
        this.committedPoints = pointIndex + 1;
        this.pushEvent(
          this.graph.branch_points[pointIndex].time_s,
          scene,
          branch,
          "default_timeout",
          null,
        );
      }
    } else {
      // crossing a point backward re-arms it
      if (this.pending && target < this.graph.branch_points[this.pending.pointIndex].time_s) {
        this.pending = null;
        if (this.mode === "choice_pending") this.mode = "playing";
      }
      while (
        this.committedPoints > 0 &&
        this.graph.branch_points[this.committedPoints - 1].time_s > target
      ) {
        this.committedPoints -= 1;
      }
    }
    this.playheadS = target;
    if (target < this.durationS) this.endedFired = false;
    this.firedNarrations.clear();
  }
}
