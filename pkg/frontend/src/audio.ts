/**
 * Notification tick and stereo-panned option prompts. Narration and cues go
 * through the host speech facility when present (centered, not panned).
 */

export class AudioCues {
  private ctx: AudioContext | null = null;

  private ensure(): AudioContext | null {
    if (typeof AudioContext === "undefined") return null;
    if (!this.ctx) this.ctx = new AudioContext();
    return this.ctx;
  }

  /** Short notification tick (the half-second "vibration"). */
  ping(durationS = 0.5): void {
    const ctx = this.ensure();
    if (!ctx) return;
    this.tone(ctx, 880, durationS, 0);
  }

  /** Option prompt: left option panned left, then right option panned right. */
  options(hasRight: boolean): void {
    const ctx = this.ensure();
    if (!ctx) return;
    this.tone(ctx, 660, 0.25, -1);
    if (hasRight) this.tone(ctx, 660, 0.25, 1, 0.45);
  }

  private tone(ctx: AudioContext, freq: number, durationS: number, pan: number, delayS = 0): void {
    const osc = ctx.createOscillator();
    const gain = ctx.createGain();
    osc.frequency.value = freq;
    gain.gain.value = 0.12;
    const start = ctx.currentTime + delayS;
    gain.gain.setValueAtTime(0.12, start);
    gain.gain.exponentialRampToValueAtTime(1e-4, start + durationS);
    let node: AudioNode = gain;
    if (typeof StereoPannerNode !== "undefined") {
      const panner = ctx.createStereoPanner();
      panner.pan.value = pan;
      gain.connect(panner);
      node = panner;
    }
    osc.connect(gain);
    node.connect(ctx.destination);
    osc.start(start);
    osc.stop(start + durationS);
  }
}

/** Speak through the platform speech facility if present; mono by design. */
export function speak(text: string): void {
  if (typeof speechSynthesis === "undefined" || !text) return;
  const utterance = new SpeechSynthesisUtterance(text);
  utterance.rate = 1.15; // narration renders slightly fast to fit its slot
  speechSynthesis.speak(utterance);
}
