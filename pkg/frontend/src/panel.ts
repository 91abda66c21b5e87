/**
 * Parameter panel: live controls mapped one-to-one onto `params` messages,
 * plus connection status and clearance readout. Plain DOM, no framework.
 */

import { encodeParams, encodeReset } from "./protocol";

export interface PanelHooks {
  send: (encoded: string) => boolean;
  reconnect: () => void;
}

export interface PanelElements {
  root: HTMLElement;
  status: HTMLElement;
  readout: HTMLElement;
}

export function buildPanel(hooks: PanelHooks): PanelElements {
  const root = document.createElement("div");
  root.id = "panel";

  const status = document.createElement("div");
  status.className = "status";
  status.textContent = "disconnected";
  root.appendChild(status);

  const retry = button("reconnect", () => hooks.reconnect());
  root.appendChild(retry);

  const cbf = document.createElement("input");
  cbf.type = "checkbox";
  cbf.checked = true;
  cbf.onchange = () => hooks.send(encodeParams({ cbf_enabled: cbf.checked }));
  root.appendChild(labeled("collision barrier", cbf));

  root.appendChild(
    slider("gamma (1/s)", 0.5, 20, 0.5, 5, (v) =>
      hooks.send(encodeParams({ gamma: v })),
    ),
  );
  root.appendChild(
    slider("activation (mm)", 10, 40, 0.5, 11, (v) =>
      hooks.send(encodeParams({ activation_distance: v / 1000 })),
    ),
  );
  root.appendChild(
    slider("scale", 0.5, 2.0, 0.05, 1.0, (v) =>
      hooks.send(encodeParams({ keypoint_scale: v })),
    ),
  );
  root.appendChild(button("reset pose", () => hooks.send(encodeReset())));

  const readout = document.createElement("div");
  readout.className = "readout";
  readout.textContent = "h_min: --";
  root.appendChild(readout);

  return { root, status, readout };
}

function button(label: string, onClick: () => void): HTMLButtonElement {
  const b = document.createElement("button");
  b.textContent = label;
  b.onclick = onClick;
  return b;
}

function labeled(text: string, control: HTMLElement): HTMLLabelElement {
  const l = document.createElement("label");
  l.appendChild(control);
  l.appendChild(document.createTextNode(" " + text));
  return l;
}

function slider(
  text: string,
  min: number,
  max: number,
  step: number,
  value: number,
  onInput: (v: number) => void,
): HTMLLabelElement {
  const s = document.createElement("input");
  s.type = "range";
  s.min = String(min);
  s.max = String(max);
  s.step = String(step);
  s.value = String(value);
  const val = document.createElement("span");
  val.textContent = String(value);
  s.oninput = () => {
    val.textContent = s.value;
    onInput(Number(s.value));
  };
  const l = document.createElement("label");
  l.appendChild(document.createTextNode(text + " "));
  l.appendChild(s);
  l.appendChild(val);
  return l;
}
