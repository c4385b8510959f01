/**
 * Browser shell: wires the state machine to canvas rendering, keyboard
 * input, audio cues, and the overlay UI.
 *
 * Query parameters:
 *   ?graph=<url>    branch graph document (default branchgraph.json)
 *   ?frames=<dir>   per-second equirectangular frames <dir>/000000.png ...
 *   ?video=<url>    equirectangular video instead of frames
 */

import { AudioCues, speak } from "./audio";
import { BINDINGS } from "./keys";
import { parseGraph, GraphSchemaError } from "./graph";
import { Effect, Player, SEEK_STEP_S } from "./player";
import { ViewportRenderer } from "./renderer";
import { traceToJson } from "./trace";

const $ = (id: string) => document.getElementById(id)!;

function setText(id: string, text: string): void {
  $(id).textContent = text;
}

function show(id: string, visible: boolean): void {
  $(id).style.display = visible ? "" : "none";
}

class FrameSource {
  private cache = new Map<number, HTMLImageElement>();

  constructor(private readonly baseUrl: string) {}

  get(frame: number): HTMLImageElement | null {
    let img = this.cache.get(frame);
    if (!img) {
      img = new Image();
      img.src = `${this.baseUrl}/${String(frame).padStart(6, "0")}.png`;
      this.cache.set(frame, img);
      // keep the next seconds warm
      for (let ahead = 1; ahead <= 3; ahead++) this.prefetch(frame + ahead);
    }
    return img.complete && img.naturalWidth > 0 ? img : null;
  }

  private prefetch(frame: number): void {
    if (this.cache.has(frame)) return;
    const img = new Image();
    img.src = `${this.baseUrl}/${String(frame).padStart(6, "0")}.png`;
    this.cache.set(frame, img);
  }
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(location.search);
  const graphUrl = params.get("graph") ?? "branchgraph.json";
  const framesDir = params.get("frames");
  const videoUrl = params.get("video");

  let player: Player;
  const audio = new AudioCues();

  const onEffect = (effect: Effect): void => {
    switch (effect.kind) {
      case "ping":
        audio.ping(effect.durationS);
        $("viewport").classList.add("pulse");
        setTimeout(() => $("viewport").classList.remove("pulse"), effect.durationS * 1000);
        break;
      case "countdown":
        show("countdown", true);
        break;
      case "options":
        show("options", true);
        setText("option-left", `◀ ${effect.left.title}`);
        setText("option-right", effect.right ? `${effect.right.title} ▶` : "");
        audio.options(effect.right !== null);
        speak(`Options. Left: ${effect.left.title}.` + (effect.right ? ` Right: ${effect.right.title}.` : ""));
        break;
      case "cue":
        setText("cue", effect.announcement);
        if (effect.recap) {
          setText("recap", effect.recap);
          show("recap", true);
          setTimeout(() => show("recap", false), 4000);
          speak(`${effect.recap}. ${effect.announcement}`);
        }
        show("options", false);
        show("countdown", false);
        break;
      case "caption":
        setText("caption", effect.text ?? "no description here");
        show("caption", true);
        if (effect.text) speak(effect.text);
        break;
      case "narration":
        setText("narration", effect.text);
        show("narration", true);
        speak(effect.text);
        setTimeout(() => show("narration", false), 6000);
        break;
      case "ended":
        setText("cue", "The story has ended. Navigate to revisit branches.");
        break;
    }
  };

  try {
    const response = await fetch(graphUrl);
    if (!response.ok) throw new GraphSchemaError(`cannot fetch ${graphUrl}: ${response.status}`);
    player = new Player(parseGraph(await response.text()), onEffect);
  } catch (err) {
    setText("error", err instanceof GraphSchemaError ? err.message : String(err));
    show("error-screen", true);
    return;
  }

  const canvas = $("viewport") as HTMLCanvasElement;
  const firstBranch = player.graph.scenes[0].branches[0];
  const renderer = new ViewportRenderer(
    canvas,
    firstBranch.viewport.h_fov_deg,
    firstBranch.viewport.v_fov_deg,
  );
  const frames = framesDir ? new FrameSource(framesDir) : null;
  let video: HTMLVideoElement | null = null;
  if (videoUrl) {
    video = document.createElement("video");
    video.src = videoUrl;
    video.muted = true;
    video.preload = "auto";
  }

  const help = BINDINGS.map((b) => `${b.keys.join("/")} - ${b.action}`).join("\n");
  setText("help", help);

  document.addEventListener("keydown", (event) => {
    const key = event.key === " " ? "Space" : event.key;
    switch (key) {
      case "Space":
        player.pressChoose();
        break;
      case "ArrowLeft":
        player.selectOption("left");
        break;
      case "ArrowRight":
        player.selectOption("right");
        break;
      case "[":
        player.navigate("branch_prev");
        break;
      case "]":
        player.navigate("branch_next");
        break;
      case "PageUp":
        player.navigate("point_prev");
        break;
      case "PageDown":
        player.navigate("point_next");
        break;
      case "Enter":
        player.confirmNavigation();
        break;
      case "Escape":
        player.cancelNavigation();
        break;
      case "k":
        player.togglePause();
        break;
      case "j":
        player.seek(-SEEK_STEP_S);
        break;
      case "l":
        player.seek(SEEK_STEP_S);
        break;
      case "a":
        player.steerLook(8, 0);
        break;
      case "d":
        player.steerLook(-8, 0);
        break;
      case "w":
        player.steerLook(0, 6);
        break;
      case "s":
        player.steerLook(0, -6);
        break;
      case "t": {
        const blob = new Blob([traceToJson(player.trace())], { type: "application/json" });
        const link = document.createElement("a");
        link.href = URL.createObjectURL(blob);
        link.download = "trace.json";
        link.click();
        break;
      }
      default:
        return;
    }
    event.preventDefault();
  });

  let last = performance.now();
  const loop = (now: number): void => {
    const dt = Math.min(0.25, (now - last) / 1000);
    last = now;
    player.tick(dt);

    const remaining = player.countdownRemaining();
    if (remaining !== null) {
      setText("countdown", `choose in ${remaining.toFixed(1)} s (Space)`);
    } else {
      show("countdown", false);
    }
    setText("strip", player.locationLabel());
    setText(
      "status",
      `${player.mode}  t=${player.playheadS.toFixed(1)}s  frame ${player.currentFrame()}`,
    );
    if (player.mode !== "paused_explore") show("caption", false);

    const center = player.viewportCenter();
    if (video && video.readyState >= 2) {
      video.currentTime = player.playheadS;
      renderer.render(video, video.videoWidth, video.videoHeight, center);
    } else if (frames) {
      const img = frames.get(player.currentFrame());
      if (img) renderer.render(img, img.naturalWidth, img.naturalHeight, center);
    }
    requestAnimationFrame(loop);
  };
  requestAnimationFrame(loop);
}

boot();
